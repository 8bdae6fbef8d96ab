#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sacscore::chess {

enum class Color : std::uint8_t { white = 0, black = 1 };

constexpr Color operator~(Color c) { return c == Color::white ? Color::black : Color::white; }

/// +1 for white, -1 for black. Used to turn white-perspective quantities
/// into mover-perspective ones.
constexpr int sign_of(Color c) { return c == Color::white ? 1 : -1; }

std::string_view to_string(Color c);

enum class PieceType : std::uint8_t { none = 0, pawn, knight, bishop, rook, queen, king };

char piece_letter(PieceType t);  // upper case, 'P' for pawns
std::optional<PieceType> piece_from_letter(char upper);
std::string_view piece_name(PieceType t);

/// A colored piece packed into one byte; the default value is an empty square.
class Piece {
public:
    constexpr Piece() = default;
    constexpr Piece(Color c, PieceType t)
        : code_(t == PieceType::none ? 0
                                     : static_cast<std::uint8_t>(static_cast<int>(t) |
                                                                 (static_cast<int>(c) << 3))) {}

    constexpr bool empty() const { return code_ == 0; }
    constexpr PieceType type() const { return static_cast<PieceType>(code_ & 7); }
    constexpr Color color() const { return static_cast<Color>(code_ >> 3); }
    constexpr bool is(Color c, PieceType t) const { return code_ == Piece(c, t).code_; }

    /// FEN letter: upper case for white, lower case for black.
    char fen_char() const;
    static std::optional<Piece> from_fen_char(char ch);

    constexpr bool operator==(const Piece&) const = default;

private:
    std::uint8_t code_ = 0;
};

/// Board square, a1 = 0 ... h8 = 63.
class Square {
public:
    constexpr Square() = default;
    constexpr explicit Square(int index) : index_(static_cast<std::int8_t>(index)) {}
    static constexpr Square at(int file, int rank) { return Square(rank * 8 + file); }

    constexpr int index() const { return index_; }
    constexpr int file() const { return index_ & 7; }
    constexpr int rank() const { return index_ >> 3; }
    constexpr bool valid() const { return index_ >= 0 && index_ < 64; }
    constexpr std::uint64_t bit() const { return std::uint64_t{1} << index_; }

    std::string name() const;
    static std::optional<Square> parse(std::string_view text);

    constexpr auto operator<=>(const Square&) const = default;

private:
    std::int8_t index_ = -1;
};

enum class MoveKind : std::uint8_t { normal, capture, castle, en_passant, promotion };

/// A move as produced by the legal move generator. `captured` records the
/// victim's class (pawn for en passant) so material bookkeeping does not have
/// to look at the board again.
struct Move {
    Square from;
    Square to;
    PieceType promotion = PieceType::none;
    MoveKind kind = MoveKind::normal;
    PieceType moved = PieceType::none;
    PieceType captured = PieceType::none;

    bool is_capture() const { return captured != PieceType::none; }

    /// Long algebraic coordinate form used by UCI ("e2e4", "e7e8q").
    std::string uci() const;

    bool operator==(const Move&) const = default;
};

enum CastlingRight : std::uint8_t {
    white_kingside = 1,
    white_queenside = 2,
    black_kingside = 4,
    black_queenside = 8,
};

}  // namespace sacscore::chess
