#pragma once

#include "sacscore/chess/position.hpp"

#include <cstdint>

namespace sacscore::chess {

/// Fixed exchange values in pawns: P=1, N=3, B=3, R=5, Q=9, K=0.
constexpr int piece_value(PieceType t)
{
    switch (t) {
    case PieceType::pawn: return 1;
    case PieceType::knight: return 3;
    case PieceType::bishop: return 3;
    case PieceType::rook: return 5;
    case PieceType::queen: return 9;
    default: return 0;
    }
}

/// White material minus black material, in pawns.
int material_balance(const Position& p);

/// Outcome of the best capture sequence on m's target square from the
/// mover's point of view (swap algorithm with x-rays, pins ignored). Works
/// for quiet moves too: the first gain is then zero.
int static_exchange_eval(const Position& p, const Move& m);

/// Pieces that attack `target` given occupancy `occupied`, both colors. Pins
/// are ignored; sliders behind removed pieces are seen through.
std::uint64_t attackers_to(const Position& p, Square target, std::uint64_t occupied);

std::uint64_t occupancy(const Position& p);

}  // namespace sacscore::chess
