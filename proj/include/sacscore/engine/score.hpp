#pragma once

#include "sacscore/chess/types.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace sacscore::engine {

enum class ScoreKind { centipawns, mate };

/// Engine score, always from white's point of view. For mate scores `value`
/// is the signed number of moves to mate (+3: white mates in 3).
struct NormalizedScore {
    ScoreKind kind = ScoreKind::centipawns;
    int value = 0;

    static NormalizedScore cp(int v) { return {ScoreKind::centipawns, v}; }
    static NormalizedScore mate_in(int moves) { return {ScoreKind::mate, moves}; }

    /// Scalar centipawns; mates map to +-(10000 - 2*|moves|).
    int centipawns() const;
    NormalizedScore flipped() const { return {kind, -value}; }
    std::string str() const;  // "+35cp", "#+3"

    bool operator==(const NormalizedScore&) const = default;
};

inline constexpr int mate_scalar_base = 10000;
inline constexpr int max_centipawns = 30000;

/// Raw UCI score token ("cp 35", "mate -3") reported for `side_to_move`.
/// Throws std::invalid_argument on anything else.
NormalizedScore normalize_score(std::string_view raw, chess::Color side_to_move);

}  // namespace sacscore::engine
