#include "sacscore/chess/material.hpp"

#include "sacscore/chess/attacks.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace sacscore::chess {

namespace {

// King gets a value larger than any exchange so it is always taken last.
constexpr int see_value(PieceType t) { return t == PieceType::king ? 100 : piece_value(t); }

}  // namespace

int material_balance(const Position& p)
{
    int sum = 0;
    for (int i = 0; i < 64; ++i) {
        const Piece pc = p.piece_at(Square(i));
        if (!pc.empty())
            sum += sign_of(pc.color()) * piece_value(pc.type());
    }
    return sum;
}

std::uint64_t occupancy(const Position& p)
{
    std::uint64_t occ = 0;
    for (int i = 0; i < 64; ++i)
        if (!p.piece_at(Square(i)).empty())
            occ |= std::uint64_t{1} << i;
    return occ;
}

std::uint64_t attackers_to(const Position& p, Square target, std::uint64_t occupied)
{
    std::uint64_t out = 0;
    const int t = target.index();
    auto present = [&](int sq) { return (occupied >> sq) & 1; };
    for (Color c : {Color::white, Color::black}) {
        for (int sq : attacks::pawn_attacks(~c, t))
            if (present(sq) && p.piece_at(Square(sq)).is(c, PieceType::pawn))
                out |= std::uint64_t{1} << sq;
    }
    for (int sq : attacks::knight_targets(t))
        if (present(sq) && p.piece_at(Square(sq)).type() == PieceType::knight)
            out |= std::uint64_t{1} << sq;
    for (int sq : attacks::king_targets(t))
        if (present(sq) && p.piece_at(Square(sq)).type() == PieceType::king)
            out |= std::uint64_t{1} << sq;
    for (int d = 0; d < 8; ++d) {
        for (int sq : attacks::ray(t, d)) {
            if (!present(sq))
                continue;
            const PieceType pt = p.piece_at(Square(sq)).type();
            const bool slider = pt == PieceType::queen ||
                                (attacks::is_diagonal(d) ? pt == PieceType::bishop : pt == PieceType::rook);
            if (slider)
                out |= std::uint64_t{1} << sq;
            break;
        }
    }
    return out;
}

int static_exchange_eval(const Position& p, const Move& m)
{
    std::array<int, 40> gain{};
    int depth = 0;
    const Square to = m.to;
    std::uint64_t occupied = occupancy(p);

    gain[0] = piece_value(m.captured);
    int on_square = see_value(m.moved);
    if (m.promotion != PieceType::none) {
        gain[0] += piece_value(m.promotion) - piece_value(PieceType::pawn);
        on_square = see_value(m.promotion);
    }
    occupied &= ~m.from.bit();
    if (m.kind == MoveKind::en_passant) {
        const int dir = p.side_to_move() == Color::white ? -8 : 8;
        occupied &= ~Square(to.index() + dir).bit();
    }
    occupied |= to.bit();

    Color stm = ~p.side_to_move();
    while (depth + 1 < static_cast<int>(gain.size())) {
        const std::uint64_t all = attackers_to(p, to, occupied) & occupied & ~to.bit();
        std::uint64_t mine = 0;
        for (std::uint64_t bits = all; bits; bits &= bits - 1) {
            const int sq = std::countr_zero(bits);
            if (p.piece_at(Square(sq)).color() == stm)
                mine |= std::uint64_t{1} << sq;
        }
        if (!mine)
            break;
        int lva_sq = -1;
        int lva_value = 1000;
        for (std::uint64_t bits = mine; bits; bits &= bits - 1) {
            const int sq = std::countr_zero(bits);
            const int v = see_value(p.piece_at(Square(sq)).type());
            if (v < lva_value) {
                lva_value = v;
                lva_sq = sq;
            }
        }
        // The king may only recapture when nothing defends the square.
        if (lva_value == see_value(PieceType::king) && (all & ~mine))
            break;
        ++depth;
        gain[depth] = on_square - gain[depth - 1];
        on_square = lva_value;
        occupied &= ~(std::uint64_t{1} << lva_sq);
        stm = ~stm;
    }
    while (depth > 0) {
        gain[depth - 1] = -std::max(-gain[depth - 1], gain[depth]);
        --depth;
    }
    return gain[0];
}

}  // namespace sacscore::chess
