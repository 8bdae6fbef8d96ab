#pragma once

#include "sacscore/chess/position.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sacscore::chess {

enum class GameResult { white_wins, black_wins, draw, unknown };

std::string_view to_string(GameResult r);

/// How replaying the mainline ended.
enum class Termination { none, checkmate, stalemate, threefold_repetition, fifty_move_rule, insufficient_material };

std::string_view to_string(Termination t);

struct PlayedMove {
    Move move;
    std::string san;  // as written in the source
};

struct GameRecord {
    std::vector<std::pair<std::string, std::string>> tags;  // file order, verbatim
    std::vector<PlayedMove> moves;
    GameResult result = GameResult::unknown;

    std::optional<std::string> tag(std::string_view key) const;
    Position start_position() const;
    /// Position before ply `ply` (0-based); ply == moves.size() is the final position.
    Position position_before(std::size_t ply) const;
    std::vector<Position> positions() const;  // size moves.size() + 1
    Termination termination() const;
};

class PgnError : public std::runtime_error {
public:
    PgnError(std::size_t game_index, std::size_t ply, const std::string& what)
        : std::runtime_error("game " + std::to_string(game_index + 1) + ", ply " + std::to_string(ply + 1) +
                             ": " + what),
          game_index_(game_index),
          ply_(ply) {}
    std::size_t game_index() const { return game_index_; }
    std::size_t ply() const { return ply_; }

private:
    std::size_t game_index_;
    std::size_t ply_;
};

/// Parses every game in `text`. Comments, NAGs and variations are skipped.
/// Positions from a FEN tag are read with lenient castling.
std::vector<GameRecord> parse_pgn(std::string_view text);

std::string write_pgn(const GameRecord& game);

}  // namespace sacscore::chess
