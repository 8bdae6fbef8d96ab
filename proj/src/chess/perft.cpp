#include "sacscore/chess/perft.hpp"

namespace sacscore::chess {

std::uint64_t perft(const Position& p, int depth)
{
    if (depth <= 0)
        return 1;
    if (depth == 1)
        return p.count_legal_moves();
    std::uint64_t nodes = 0;
    for (const Move& m : p.legal_moves())
        nodes += perft(p.apply_unchecked(m), depth - 1);
    return nodes;
}

std::vector<std::pair<std::string, std::uint64_t>> perft_divide(const Position& p, int depth)
{
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (const Move& m : p.legal_moves())
        out.emplace_back(m.uci(), perft(p.apply_unchecked(m), depth - 1));
    return out;
}

}  // namespace sacscore::chess
