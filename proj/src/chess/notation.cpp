#include "sacscore/chess/notation.hpp"

#include <cctype>
#include <vector>

namespace sacscore::chess {

namespace {

std::string strip_suffixes(std::string_view token)
{
    std::string s(token);
    while (!s.empty() && (s.back() == '+' || s.back() == '#' || s.back() == '!' || s.back() == '?'))
        s.pop_back();
    return s;
}

Move pick(const Position& p, std::vector<Move> candidates, std::string_view token)
{
    if (candidates.empty())
        throw SanError(SanError::Kind::illegal,
                       "illegal move '" + std::string(token) + "' in " + p.fen());
    if (candidates.size() > 1)
        throw SanError(SanError::Kind::ambiguous,
                       "ambiguous move '" + std::string(token) + "' in " + p.fen());
    return candidates.front();
}

}  // namespace

Move parse_san(const Position& p, std::string_view token)
{
    const std::string s = strip_suffixes(token);
    auto unparseable = [&]() {
        return SanError(SanError::Kind::unparseable, "cannot parse move '" + std::string(token) + "'");
    };
    if (s.empty())
        throw unparseable();

    if (s == "O-O" || s == "0-0" || s == "O-O-O" || s == "0-0-0") {
        const bool kingside = s.size() == 3;
        std::vector<Move> found;
        for (const Move& m : p.legal_moves())
            if (m.kind == MoveKind::castle && (m.to.file() == 6) == kingside)
                found.push_back(m);
        return pick(p, std::move(found), token);
    }

    std::size_t pos = 0;
    PieceType piece = PieceType::pawn;
    if (std::isupper(static_cast<unsigned char>(s[0]))) {
        const auto t = piece_from_letter(s[0]);
        if (!t || *t == PieceType::pawn)
            throw unparseable();
        piece = *t;
        pos = 1;
    }

    // Remaining grammar: [file][rank][x]<square>[=?promotion]
    std::string body = s.substr(pos);
    PieceType promotion = PieceType::none;
    if (const auto eq = body.find('='); eq != std::string::npos) {
        if (eq + 2 != body.size())
            throw unparseable();
        const auto t = piece_from_letter(static_cast<char>(std::toupper(static_cast<unsigned char>(body[eq + 1]))));
        if (!t || *t == PieceType::pawn || *t == PieceType::king)
            throw unparseable();
        promotion = *t;
        body.resize(eq);
    } else if (piece == PieceType::pawn && body.size() >= 3 && std::isalpha(static_cast<unsigned char>(body.back())) &&
               std::isdigit(static_cast<unsigned char>(body[body.size() - 2]))) {
        // "e8Q" form without '='
        const auto t = piece_from_letter(static_cast<char>(std::toupper(static_cast<unsigned char>(body.back()))));
        if (!t || *t == PieceType::pawn || *t == PieceType::king)
            throw unparseable();
        promotion = *t;
        body.pop_back();
    }

    if (body.size() < 2)
        throw unparseable();
    const auto to = Square::parse(body.substr(body.size() - 2));
    if (!to)
        throw unparseable();
    std::string prefix = body.substr(0, body.size() - 2);
    bool capture_marked = false;
    if (!prefix.empty() && (prefix.back() == 'x' || prefix.back() == ':')) {
        capture_marked = true;
        prefix.pop_back();
    }
    int from_file = -1;
    int from_rank = -1;
    for (char ch : prefix) {
        if (ch >= 'a' && ch <= 'h' && from_file < 0)
            from_file = ch - 'a';
        else if (ch >= '1' && ch <= '8' && from_rank < 0)
            from_rank = ch - '1';
        else
            throw unparseable();
    }
    if (prefix.size() > 2)
        throw unparseable();

    std::vector<Move> found;
    for (const Move& m : p.legal_moves()) {
        if (m.moved != piece || m.to != *to || m.promotion != promotion || m.kind == MoveKind::castle)
            continue;
        if (from_file >= 0 && m.from.file() != from_file)
            continue;
        if (from_rank >= 0 && m.from.rank() != from_rank)
            continue;
        if (capture_marked && !m.is_capture())
            continue;
        found.push_back(m);
    }
    return pick(p, std::move(found), token);
}

std::string to_san(const Position& p, const Move& m)
{
    std::string out;
    if (m.kind == MoveKind::castle) {
        out = m.to.file() == 6 ? "O-O" : "O-O-O";
    } else if (m.moved == PieceType::pawn) {
        if (m.is_capture()) {
            out += static_cast<char>('a' + m.from.file());
            out += 'x';
        }
        out += m.to.name();
        if (m.promotion != PieceType::none) {
            out += '=';
            out += piece_letter(m.promotion);
        }
    } else {
        out += piece_letter(m.moved);
        bool same_file = false;
        bool same_rank = false;
        bool other = false;
        for (const Move& o : p.legal_moves()) {
            if (o.moved != m.moved || o.to != m.to || o.from == m.from)
                continue;
            other = true;
            same_file = same_file || o.from.file() == m.from.file();
            same_rank = same_rank || o.from.rank() == m.from.rank();
        }
        if (other) {
            if (!same_file)
                out += static_cast<char>('a' + m.from.file());
            else if (!same_rank)
                out += static_cast<char>('1' + m.from.rank());
            else
                out += m.from.name();
        }
        if (m.is_capture())
            out += 'x';
        out += m.to.name();
    }
    const Position next = p.apply_unchecked(m);
    if (next.in_check())
        out += next.has_legal_move() ? '+' : '#';
    return out;
}

}  // namespace sacscore::chess
