#pragma once

#include "sacscore/chess/position.hpp"

#include <random>
#include <vector>

namespace sacscore::test {

/// Positions reached by uniformly random legal playouts from the initial
/// position; deterministic for a given seed.
inline std::vector<chess::Position> random_positions(std::size_t count, unsigned seed, int max_plies = 80)
{
    std::mt19937 rng(seed);
    std::vector<chess::Position> out;
    out.reserve(count);
    while (out.size() < count) {
        chess::Position p;
        const int plies = std::uniform_int_distribution<int>(0, max_plies)(rng);
        for (int i = 0; i < plies; ++i) {
            const auto moves = p.legal_moves();
            if (moves.empty())
                break;
            p = p.apply_unchecked(moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)]);
        }
        out.push_back(p);
    }
    return out;
}

inline const char* const figure_fens[5] = {
    "3rn1k1/5ppn/1p1P4/1r2pPP1/2q1P3/5BK1/1R5Q/3R4 w q - 0 1",
    "r3r1k1/1p4bp/6p1/8/1p1qp1b1/P5P1/1PQ1PPBP/R2NK2R b KQq - 0 1",
    "7Q/5kpp/5n2/4n1B1/4q3/5R2/PP4KP/R7 w - - 0 1",
    "2kr1b1r/1pp2ppp/p1P1p3/P3q3/1n6/2N1BB2/1P3PPP/R2Q1RK1 b Qk - 0 1",
    "rq3rk1/3bbp2/p1npp1p1/1p6/2P2P2/1NN3P1/PP1Q1PB1/R3R1K1 w Qq - 0 1",
};

}  // namespace sacscore::test
