#include "sacscore/chess/attacks.hpp"

#include <array>
#include <vector>

namespace sacscore::chess::attacks {

namespace {

struct Tables {
    std::array<std::vector<int>, 64> knight;
    std::array<std::vector<int>, 64> king;
    std::array<std::array<std::vector<int>, 64>, 2> pawn;
    std::array<std::array<std::vector<int>, 8>, 64> rays;

    Tables()
    {
        constexpr int knight_d[8][2] = {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
        constexpr int king_d[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
        constexpr int ray_d[8][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
        auto on_board = [](int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; };

        for (int sq = 0; sq < 64; ++sq) {
            const int f = sq & 7;
            const int r = sq >> 3;
            for (const auto& d : knight_d)
                if (on_board(f + d[0], r + d[1]))
                    knight[sq].push_back((r + d[1]) * 8 + f + d[0]);
            for (const auto& d : king_d)
                if (on_board(f + d[0], r + d[1]))
                    king[sq].push_back((r + d[1]) * 8 + f + d[0]);
            for (int df : {-1, 1}) {
                if (on_board(f + df, r + 1))
                    pawn[0][sq].push_back((r + 1) * 8 + f + df);
                if (on_board(f + df, r - 1))
                    pawn[1][sq].push_back((r - 1) * 8 + f + df);
            }
            for (int d = 0; d < 8; ++d) {
                int tf = f + ray_d[d][0];
                int tr = r + ray_d[d][1];
                while (on_board(tf, tr)) {
                    rays[sq][d].push_back(tr * 8 + tf);
                    tf += ray_d[d][0];
                    tr += ray_d[d][1];
                }
            }
        }
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}

}  // namespace

std::span<const int> knight_targets(int square) { return tables().knight[square]; }
std::span<const int> king_targets(int square) { return tables().king[square]; }
std::span<const int> pawn_attacks(Color c, int square) { return tables().pawn[static_cast<int>(c)][square]; }
std::span<const int> ray(int square, int d) { return tables().rays[square][d]; }

}  // namespace sacscore::chess::attacks
