#pragma once

#include "sacscore/chess/types.hpp"

#include <span>

// Precomputed square geometry shared by move generation and exchange
// evaluation. Directions 0-3 are orthogonal, 4-7 diagonal.
namespace sacscore::chess::attacks {

std::span<const int> knight_targets(int square);
std::span<const int> king_targets(int square);
/// Squares a pawn of color `c` standing on `square` attacks.
std::span<const int> pawn_attacks(Color c, int square);
/// Squares along direction `d` from `square`, nearest first.
std::span<const int> ray(int square, int d);

constexpr bool is_diagonal(int d) { return d >= 4; }

}  // namespace sacscore::chess::attacks
