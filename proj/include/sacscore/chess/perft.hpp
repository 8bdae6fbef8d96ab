#pragma once

#include "sacscore/chess/position.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sacscore::chess {

/// Leaf count of the legal move tree to `depth` plies.
std::uint64_t perft(const Position& p, int depth);

/// Per-root-move leaf counts, in move generation order.
std::vector<std::pair<std::string, std::uint64_t>> perft_divide(const Position& p, int depth);

}  // namespace sacscore::chess
