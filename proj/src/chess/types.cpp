#include "sacscore/chess/types.hpp"

#include <cctype>

namespace sacscore::chess {

std::string_view to_string(Color c) { return c == Color::white ? "white" : "black"; }

char piece_letter(PieceType t)
{
    switch (t) {
    case PieceType::pawn: return 'P';
    case PieceType::knight: return 'N';
    case PieceType::bishop: return 'B';
    case PieceType::rook: return 'R';
    case PieceType::queen: return 'Q';
    case PieceType::king: return 'K';
    case PieceType::none: break;
    }
    return '?';
}

std::optional<PieceType> piece_from_letter(char upper)
{
    switch (upper) {
    case 'P': return PieceType::pawn;
    case 'N': return PieceType::knight;
    case 'B': return PieceType::bishop;
    case 'R': return PieceType::rook;
    case 'Q': return PieceType::queen;
    case 'K': return PieceType::king;
    default: return std::nullopt;
    }
}

std::string_view piece_name(PieceType t)
{
    switch (t) {
    case PieceType::pawn: return "pawn";
    case PieceType::knight: return "knight";
    case PieceType::bishop: return "bishop";
    case PieceType::rook: return "rook";
    case PieceType::queen: return "queen";
    case PieceType::king: return "king";
    case PieceType::none: break;
    }
    return "none";
}

char Piece::fen_char() const
{
    if (empty())
        return '.';
    const char c = piece_letter(type());
    return color() == Color::white ? c : static_cast<char>(std::tolower(c));
}

std::optional<Piece> Piece::from_fen_char(char ch)
{
    const auto upper = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const auto type = piece_from_letter(upper);
    if (!type)
        return std::nullopt;
    return Piece(ch == upper ? Color::white : Color::black, *type);
}

std::string Square::name() const
{
    if (!valid())
        return "-";
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::optional<Square> Square::parse(std::string_view text)
{
    if (text.size() != 2 || text[0] < 'a' || text[0] > 'h' || text[1] < '1' || text[1] > '8')
        return std::nullopt;
    return Square::at(text[0] - 'a', text[1] - '1');
}

std::string Move::uci() const
{
    std::string s = from.name() + to.name();
    if (promotion != PieceType::none)
        s += static_cast<char>(std::tolower(piece_letter(promotion)));
    return s;
}

}  // namespace sacscore::chess
