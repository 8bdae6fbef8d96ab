#include "sacscore/chess/position.hpp"

#include "sacscore/chess/attacks.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace sacscore::chess {

namespace {

constexpr std::array<Square, 4> castle_king_from{Square(4), Square(4), Square(60), Square(60)};
constexpr std::array<Square, 4> castle_rook_from{Square(7), Square(0), Square(63), Square(56)};

int parse_count(std::string_view text, const char* field, int min_value)
{
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || value < min_value)
        throw FenError(field, "expected an integer >= " + std::to_string(min_value) + ", got '" +
                                  std::string(text) + "'");
    return value;
}

std::uint8_t rights_lost_on(Square s)
{
    switch (s.index()) {
    case 0: return white_queenside;
    case 7: return white_kingside;
    case 4: return white_kingside | white_queenside;
    case 56: return black_queenside;
    case 63: return black_kingside;
    case 60: return black_kingside | black_queenside;
    default: return 0;
    }
}

}  // namespace

Position::Position() { *this = from_fen(start_fen); }

Position Position::from_fen(std::string_view fen, FenOptions options)
{
    std::istringstream in{std::string(fen)};
    std::vector<std::string> fields;
    for (std::string f; in >> f;)
        fields.push_back(f);
    if (fields.size() != 6)
        throw FenError("fields", "expected 6 fields, got " + std::to_string(fields.size()));

    Position p{Blank{}};

    int rank = 7;
    int file = 0;
    for (char ch : fields[0]) {
        if (ch == '/') {
            if (file != 8 || rank == 0)
                throw FenError("placement", "rank " + std::to_string(rank + 1) + " is not 8 squares wide");
            --rank;
            file = 0;
        } else if (ch >= '1' && ch <= '8') {
            file += ch - '0';
            if (file > 8)
                throw FenError("placement", "rank " + std::to_string(rank + 1) + " overflows");
        } else if (auto piece = Piece::from_fen_char(ch)) {
            if (file >= 8)
                throw FenError("placement", "rank " + std::to_string(rank + 1) + " overflows");
            p.board_[Square::at(file, rank).index()] = *piece;
            ++file;
        } else {
            throw FenError("placement", std::string("unexpected character '") + ch + "'");
        }
    }
    if (rank != 0 || file != 8)
        throw FenError("placement", "expected 8 ranks of 8 squares");

    if (fields[1] == "w")
        p.side_ = Color::white;
    else if (fields[1] == "b")
        p.side_ = Color::black;
    else
        throw FenError("side_to_move", "expected 'w' or 'b', got '" + fields[1] + "'");

    p.castling_ = 0;
    if (fields[2] != "-") {
        for (char ch : fields[2]) {
            std::uint8_t flag = 0;
            switch (ch) {
            case 'K': flag = white_kingside; break;
            case 'Q': flag = white_queenside; break;
            case 'k': flag = black_kingside; break;
            case 'q': flag = black_queenside; break;
            default:
                throw FenError("castling", std::string("unexpected character '") + ch + "'");
            }
            if (p.castling_ & flag)
                throw FenError("castling", "duplicate flag");
            p.castling_ |= flag;
        }
    }

    if (fields[3] == "-") {
        p.en_passant_.reset();
    } else {
        auto sq = Square::parse(fields[3]);
        if (!sq)
            throw FenError("en_passant", "bad square '" + fields[3] + "'");
        p.en_passant_ = sq;
    }

    p.halfmove_ = parse_count(fields[4], "halfmove_clock", 0);
    p.fullmove_ = parse_count(fields[5], "fullmove_number", 1);

    p.validate(options);
    return p;
}

void Position::validate(FenOptions options)
{
    std::array<int, 2> king_count{};
    std::array<int, 2> pawn_count{};
    for (int i = 0; i < 64; ++i) {
        const Piece pc = board_[i];
        if (pc.empty())
            continue;
        const int c = static_cast<int>(pc.color());
        if (pc.type() == PieceType::king) {
            ++king_count[c];
            kings_[c] = Square(i);
        } else if (pc.type() == PieceType::pawn) {
            ++pawn_count[c];
            const int r = Square(i).rank();
            if (r == 0 || r == 7)
                throw FenError("pawns", "pawn on " + Square(i).name());
        }
    }
    if (king_count[0] != 1 || king_count[1] != 1)
        throw FenError("kings", "each side needs exactly one king");
    if (pawn_count[0] > 8 || pawn_count[1] > 8)
        throw FenError("pawns", "more than 8 pawns for one side");

    if (!options.lenient_castling && castling_inconsistent())
        throw FenError("castling", "rights not supported by king and rook placement");

    if (en_passant_) {
        const Square ep = *en_passant_;
        const int want_rank = side_ == Color::white ? 5 : 2;
        if (ep.rank() != want_rank)
            throw FenError("en_passant", "square " + ep.name() + " is on the wrong rank");
        const int dir = side_ == Color::white ? -8 : 8;
        const Square pawn_sq(ep.index() + dir);
        if (!board_[ep.index()].empty() || !board_[pawn_sq.index()].is(~side_, PieceType::pawn))
            throw FenError("en_passant", "no pawn that just double-stepped past " + ep.name());
    }

    if (is_attacked(king_square(~side_), side_))
        throw FenError("check", "side not to move is in check");
}

bool Position::castling_inconsistent() const
{
    for (int i = 0; i < 4; ++i) {
        if (!(castling_ & (1 << i)))
            continue;
        const Color c = i < 2 ? Color::white : Color::black;
        if (!board_[castle_king_from[i].index()].is(c, PieceType::king) ||
            !board_[castle_rook_from[i].index()].is(c, PieceType::rook))
            return true;
    }
    return false;
}

std::string Position::fen() const
{
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            const Piece pc = board_[Square::at(file, rank).index()];
            if (pc.empty()) {
                ++empty;
                continue;
            }
            if (empty) {
                out += static_cast<char>('0' + empty);
                empty = 0;
            }
            out += pc.fen_char();
        }
        if (empty)
            out += static_cast<char>('0' + empty);
        if (rank)
            out += '/';
    }
    out += side_ == Color::white ? " w " : " b ";
    if (!castling_) {
        out += '-';
    } else {
        if (castling_ & white_kingside) out += 'K';
        if (castling_ & white_queenside) out += 'Q';
        if (castling_ & black_kingside) out += 'k';
        if (castling_ & black_queenside) out += 'q';
    }
    out += ' ';
    out += en_passant_ ? en_passant_->name() : "-";
    out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
    return out;
}

std::string Position::repetition_key() const
{
    const std::string f = fen();
    std::size_t spaces = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == ' ' && ++spaces == 4)
            return f.substr(0, i);
    }
    return f;
}

bool Position::is_attacked(Square s, Color by) const
{
    const int idx = s.index();
    // A pawn of `by` attacks s if it sits where a pawn of the other color on s
    // would attack.
    for (int target : attacks::pawn_attacks(~by, idx)) {
        if (board_[target].is(by, PieceType::pawn))
            return true;
    }
    for (int target : attacks::knight_targets(idx)) {
        if (board_[target].is(by, PieceType::knight))
            return true;
    }
    for (int target : attacks::king_targets(idx)) {
        if (board_[target].is(by, PieceType::king))
            return true;
    }
    for (int d = 0; d < 8; ++d) {
        const bool diagonal = attacks::is_diagonal(d);
        for (int target : attacks::ray(idx, d)) {
            const Piece pc = board_[target];
            if (pc.empty())
                continue;
            if (pc.color() == by) {
                const PieceType t = pc.type();
                if (t == PieceType::queen || (diagonal ? t == PieceType::bishop : t == PieceType::rook))
                    return true;
            }
            break;
        }
    }
    return false;
}

void Position::add_pawn_moves(Square from, std::vector<Move>& out) const
{
    const int dir = side_ == Color::white ? 8 : -8;
    const int start_rank = side_ == Color::white ? 1 : 6;
    const int last_rank = side_ == Color::white ? 7 : 0;

    auto push = [&](Square to, PieceType captured, MoveKind kind) {
        if (to.rank() == last_rank) {
            for (PieceType promo : {PieceType::queen, PieceType::rook, PieceType::bishop, PieceType::knight})
                out.push_back({from, to, promo, MoveKind::promotion, PieceType::pawn, captured});
        } else {
            out.push_back({from, to, PieceType::none, kind, PieceType::pawn, captured});
        }
    };

    const Square one(from.index() + dir);
    if (board_[one.index()].empty()) {
        push(one, PieceType::none, MoveKind::normal);
        const Square two(from.index() + 2 * dir);
        if (from.rank() == start_rank && board_[two.index()].empty())
            push(two, PieceType::none, MoveKind::normal);
    }
    for (int target : attacks::pawn_attacks(side_, from.index())) {
        const Piece victim = board_[target];
        if (!victim.empty() && victim.color() != side_ && victim.type() != PieceType::king)
            push(Square(target), victim.type(), MoveKind::capture);
        else if (en_passant_ && en_passant_->index() == target)
            out.push_back({from, Square(target), PieceType::none, MoveKind::en_passant,
                           PieceType::pawn, PieceType::pawn});
    }
}

void Position::add_castling(std::vector<Move>& out) const
{
    const int base = side_ == Color::white ? 0 : 2;
    const Color them = ~side_;
    for (int i = base; i < base + 2; ++i) {
        if (!(castling_ & (1 << i)))
            continue;
        const Square kfrom = castle_king_from[i];
        const Square rfrom = castle_rook_from[i];
        if (!board_[kfrom.index()].is(side_, PieceType::king) ||
            !board_[rfrom.index()].is(side_, PieceType::rook))
            continue;
        const bool kingside = (i % 2) == 0;
        const int step = kingside ? 1 : -1;
        bool clear = true;
        for (int sq = kfrom.index() + step; sq != rfrom.index(); sq += step)
            clear = clear && board_[sq].empty();
        if (!clear)
            continue;
        const Square kto(kfrom.index() + 2 * step);
        if (is_attacked(kfrom, them) || is_attacked(Square(kfrom.index() + step), them) ||
            is_attacked(kto, them))
            continue;
        out.push_back({kfrom, kto, PieceType::none, MoveKind::castle, PieceType::king, PieceType::none});
    }
}

void Position::generate_pseudo(std::vector<Move>& out) const
{
    for (int i = 0; i < 64; ++i) {
        const Piece pc = board_[i];
        if (pc.empty() || pc.color() != side_)
            continue;
        const Square from(i);
        auto add = [&](int target) {
            const Piece victim = board_[target];
            if (victim.empty())
                out.push_back({from, Square(target), PieceType::none, MoveKind::normal, pc.type(),
                               PieceType::none});
            else if (victim.color() != side_ && victim.type() != PieceType::king)
                out.push_back({from, Square(target), PieceType::none, MoveKind::capture, pc.type(),
                               victim.type()});
        };
        switch (pc.type()) {
        case PieceType::pawn:
            add_pawn_moves(from, out);
            break;
        case PieceType::knight:
            for (int t : attacks::knight_targets(i))
                add(t);
            break;
        case PieceType::king:
            for (int t : attacks::king_targets(i))
                add(t);
            break;
        default: {
            const int first = pc.type() == PieceType::rook ? 0 : (pc.type() == PieceType::bishop ? 4 : 0);
            const int last = pc.type() == PieceType::bishop ? 8 : (pc.type() == PieceType::rook ? 4 : 8);
            for (int d = first; d < last; ++d) {
                for (int t : attacks::ray(i, d)) {
                    add(t);
                    if (!board_[t].empty())
                        break;
                }
            }
        }
        }
    }
    add_castling(out);
}

bool Position::leaves_king_safe(const Move& m) const
{
    const Position next = apply_unchecked(m);
    return !next.is_attacked(next.king_square(side_), ~side_);
}

std::vector<Move> Position::legal_moves() const
{
    std::vector<Move> moves;
    moves.reserve(48);
    generate_pseudo(moves);
    std::erase_if(moves, [&](const Move& m) { return !leaves_king_safe(m); });
    return moves;
}

std::size_t Position::count_legal_moves() const
{
    std::vector<Move> moves;
    moves.reserve(48);
    generate_pseudo(moves);
    return static_cast<std::size_t>(
        std::count_if(moves.begin(), moves.end(), [&](const Move& m) { return leaves_king_safe(m); }));
}

bool Position::has_legal_move() const
{
    std::vector<Move> moves;
    moves.reserve(48);
    generate_pseudo(moves);
    return std::any_of(moves.begin(), moves.end(), [&](const Move& m) { return leaves_king_safe(m); });
}

Position Position::apply(const Move& m) const
{
    for (const Move& legal : legal_moves()) {
        if (legal == m)
            return apply_unchecked(m);
    }
    throw IllegalMoveError("illegal move " + m.uci() + " in " + fen());
}

Position Position::apply_unchecked(const Move& m) const
{
    Position next = *this;
    const Piece mover = board_[m.from.index()];
    const int dir = side_ == Color::white ? 8 : -8;

    next.board_[m.from.index()] = Piece{};
    if (m.kind == MoveKind::en_passant)
        next.board_[m.to.index() - dir] = Piece{};
    next.board_[m.to.index()] =
        m.promotion != PieceType::none ? Piece(side_, m.promotion) : mover;

    if (m.kind == MoveKind::castle) {
        const bool kingside = m.to.file() == 6;
        const int rank_base = m.from.rank() * 8;
        const Square rfrom(rank_base + (kingside ? 7 : 0));
        const Square rto(rank_base + (kingside ? 5 : 3));
        next.board_[rto.index()] = next.board_[rfrom.index()];
        next.board_[rfrom.index()] = Piece{};
    }
    if (mover.type() == PieceType::king)
        next.kings_[static_cast<int>(side_)] = m.to;

    next.castling_ &= static_cast<std::uint8_t>(~(rights_lost_on(m.from) | rights_lost_on(m.to)));

    next.en_passant_.reset();
    if (mover.type() == PieceType::pawn && std::abs(m.to.index() - m.from.index()) == 16)
        next.en_passant_ = Square(m.from.index() + dir);

    next.halfmove_ = (mover.type() == PieceType::pawn || m.is_capture()) ? 0 : halfmove_ + 1;
    if (side_ == Color::black)
        ++next.fullmove_;
    next.side_ = ~side_;
    return next;
}

std::optional<Move> Position::find_move(Square from, Square to, PieceType promotion) const
{
    for (const Move& m : legal_moves()) {
        if (m.from == from && m.to == to && m.promotion == promotion)
            return m;
    }
    return std::nullopt;
}

std::optional<Move> Position::find_uci(std::string_view uci) const
{
    if (uci.size() < 4 || uci.size() > 5)
        return std::nullopt;
    const auto from = Square::parse(uci.substr(0, 2));
    const auto to = Square::parse(uci.substr(2, 2));
    if (!from || !to)
        return std::nullopt;
    PieceType promo = PieceType::none;
    if (uci.size() == 5) {
        const auto t = piece_from_letter(static_cast<char>(std::toupper(static_cast<unsigned char>(uci[4]))));
        if (!t || *t == PieceType::pawn || *t == PieceType::king)
            return std::nullopt;
        promo = *t;
    }
    return find_move(*from, *to, promo);
}

bool Position::insufficient_material() const
{
    int minors = 0;
    for (const Piece pc : board_) {
        if (pc.empty() || pc.type() == PieceType::king)
            continue;
        if (pc.type() == PieceType::bishop || pc.type() == PieceType::knight)
            ++minors;
        else
            return false;
    }
    return minors <= 1;
}

Position Position::color_flipped() const
{
    Position out = *this;
    for (int i = 0; i < 64; ++i) {
        const Square s(i);
        const Piece pc = board_[Square::at(s.file(), 7 - s.rank()).index()];
        out.board_[i] = pc.empty() ? Piece{} : Piece(~pc.color(), pc.type());
    }
    out.side_ = ~side_;
    out.castling_ = static_cast<std::uint8_t>(((castling_ & 3) << 2) | ((castling_ >> 2) & 3));
    if (en_passant_)
        out.en_passant_ = Square::at(en_passant_->file(), 7 - en_passant_->rank());
    out.kings_ = {Square::at(kings_[1].file(), 7 - kings_[1].rank()),
                  Square::at(kings_[0].file(), 7 - kings_[0].rank())};
    return out;
}

std::optional<Position> Position::from_placement(const std::array<Piece, 64>& board, Color side_to_move)
{
    Position p{Blank{}};
    p.board_ = board;
    p.side_ = side_to_move;
    p.castling_ = 0;
    p.en_passant_.reset();
    p.halfmove_ = 0;
    p.fullmove_ = 1;
    std::array<int, 2> kings{};
    for (int i = 0; i < 64; ++i) {
        if (board[i].type() == PieceType::king) {
            ++kings[static_cast<int>(board[i].color())];
            p.kings_[static_cast<int>(board[i].color())] = Square(i);
        }
    }
    if (kings[0] != 1 || kings[1] != 1)
        return std::nullopt;
    if (p.is_attacked(p.king_square(~side_to_move), side_to_move))
        return std::nullopt;
    return p;
}

}  // namespace sacscore::chess
