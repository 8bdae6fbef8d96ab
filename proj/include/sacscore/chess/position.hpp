#pragma once

#include "sacscore/chess/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sacscore::chess {

inline constexpr std::string_view start_fen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

/// FEN rejected. `field()` names the offending part: one of "fields",
/// "placement", "side_to_move", "castling", "en_passant", "halfmove_clock",
/// "fullmove_number", "kings", "pawns", "check".
class FenError : public std::runtime_error {
public:
    FenError(std::string field, const std::string& what)
        : std::runtime_error("FEN " + field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class IllegalMoveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FenOptions {
    /// Accept castling flags that the placement cannot support (king or rook
    /// off its home square). Move generation still requires the pieces to be
    /// present, so such flags are inert.
    bool lenient_castling = false;
};

class Position {
public:
    /// Standard initial position.
    Position();

    static Position from_fen(std::string_view fen, FenOptions options = {});
    std::string fen() const;

    Piece piece_at(Square s) const { return board_[s.index()]; }
    Color side_to_move() const { return side_; }
    std::uint8_t castling_rights() const { return castling_; }
    std::optional<Square> en_passant() const { return en_passant_; }
    int halfmove_clock() const { return halfmove_; }
    int fullmove_number() const { return fullmove_; }
    Square king_square(Color c) const { return kings_[static_cast<int>(c)]; }

    /// True when castling flags in this position are not backed by a king and
    /// rook on their home squares (only possible with lenient parsing).
    bool castling_inconsistent() const;

    bool is_attacked(Square s, Color by) const;
    bool in_check() const { return is_attacked(king_square(side_), ~side_); }

    std::vector<Move> legal_moves() const;
    std::size_t count_legal_moves() const;
    bool has_legal_move() const;

    /// Applies a legal move. Throws IllegalMoveError if `m` is not in
    /// legal_moves().
    Position apply(const Move& m) const;
    /// Applies a move known to come from legal_moves().
    Position apply_unchecked(const Move& m) const;

    /// Finds the legal move with the given coordinates (promotion defaults to
    /// none). Returns nullopt when no legal move matches.
    std::optional<Move> find_move(Square from, Square to,
                                  PieceType promotion = PieceType::none) const;
    std::optional<Move> find_uci(std::string_view uci) const;

    bool is_checkmate() const { return in_check() && !has_legal_move(); }
    bool is_stalemate() const { return !in_check() && !has_legal_move(); }
    /// Neither side can possibly mate: bare kings, or a single minor piece.
    bool insufficient_material() const;

    /// First four FEN fields; equal keys mean the same position for the
    /// purpose of repetition detection.
    std::string repetition_key() const;

    /// Board mirrored top to bottom with colors swapped (side to move too).
    Position color_flipped() const;

    /// Builds a position from a bare placement without FEN validation of
    /// castling or clocks. Returns nullopt when kings are missing or the side
    /// not to move is in check.
    static std::optional<Position> from_placement(const std::array<Piece, 64>& board,
                                                  Color side_to_move);

    bool operator==(const Position&) const = default;

private:
    struct Blank {};
    explicit Position(Blank) {}

    void validate(FenOptions options);
    void generate_pseudo(std::vector<Move>& out) const;
    void add_pawn_moves(Square from, std::vector<Move>& out) const;
    void add_castling(std::vector<Move>& out) const;
    bool leaves_king_safe(const Move& m) const;

    std::array<Piece, 64> board_{};
    Color side_ = Color::white;
    std::uint8_t castling_ = 0;
    std::optional<Square> en_passant_;
    int halfmove_ = 0;
    int fullmove_ = 1;
    std::array<Square, 2> kings_{};
};

}  // namespace sacscore::chess
