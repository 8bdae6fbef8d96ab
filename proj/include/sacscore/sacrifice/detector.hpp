#pragma once

#include "sacscore/chess/pgn.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sacscore::sacrifice {

struct DetectorConfig {
    int horizon_plies = 6;
    int swing_threshold = 2;      // pawns
    int queen_net_threshold = 4;  // pawns
    bool exclude_even_trades = true;

    /// Throws std::invalid_argument when horizon < 2 or a threshold <= 0.
    void validate() const;
};

struct SacrificeEvent {
    std::string game_id;
    std::size_t ply = 0;
    chess::Color mover = chess::Color::white;
    chess::PieceType piece_class = chess::PieceType::pawn;
    chess::Move move;
    std::string san;  // as written in the game
    int material_swing = 0;  // pawns, mover's view
    int immediate_see = 0;   // pawns, mover's view
    bool declined = false;
};

enum class Bucket { queen, rook_or_knight, other };

std::string_view to_string(Bucket b);

/// Result of the capture-only search behind material_swing. `line` starts
/// with the move itself and follows best play until both sides stand pat.
struct SwingLine {
    int swing = 0;
    std::vector<chess::Move> line;
};

/// Worst-case material change for the side playing `m` when, after it, both
/// sides may capture (or promote) or stop, for at most `horizon` plies
/// counting `m` itself. Captures are only chosen when strictly better than
/// stopping.
SwingLine material_swing_line(const chess::Position& p, const chess::Move& m, int horizon);

inline int material_swing(const chess::Position& p, const chess::Move& m, int horizon)
{
    return material_swing_line(p, m, horizon).swing;
}

/// Most valuable class the mover gives up along `line`. With
/// `exclude_even_trades` pieces of a class the mover wins back cancel out.
chess::PieceType sacrificed_class(const chess::Position& p, const std::vector<chess::Move>& line,
                                  bool exclude_even_trades);

/// Identifier for reports: the Site tag when present, otherwise
/// "White-Black Date".
std::string game_id(const chess::GameRecord& g);

std::vector<SacrificeEvent> detect_sacrifices(const chess::GameRecord& g, const DetectorConfig& cfg = {});

Bucket classify_sacrifice(const SacrificeEvent& e);

}  // namespace sacscore::sacrifice
