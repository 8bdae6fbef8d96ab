#include "sacscore/engine/score.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

namespace sacscore::engine {

int NormalizedScore::centipawns() const
{
    if (kind == ScoreKind::centipawns)
        return value;
    const int plies = 2 * std::abs(value);
    return value > 0 ? mate_scalar_base - plies : -(mate_scalar_base - plies);
}

std::string NormalizedScore::str() const
{
    std::string sign = value >= 0 ? "+" : "";
    if (kind == ScoreKind::mate)
        return "#" + sign + std::to_string(value);
    return sign + std::to_string(value) + "cp";
}

NormalizedScore normalize_score(std::string_view raw, chess::Color side_to_move)
{
    std::istringstream in{std::string(raw)};
    std::string kind;
    std::string number;
    std::string extra;
    in >> kind >> number;
    if (in >> extra)
        throw std::invalid_argument("unexpected score token '" + std::string(raw) + "'");

    int v = 0;
    const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
    if (number.empty() || ec != std::errc{} || end != number.data() + number.size())
        throw std::invalid_argument("unexpected score token '" + std::string(raw) + "'");

    NormalizedScore s;
    if (kind == "cp") {
        if (v < -max_centipawns || v > max_centipawns)
            throw std::invalid_argument("centipawn score out of range: " + std::string(raw));
        s = NormalizedScore::cp(v);
    } else if (kind == "mate") {
        if (v == 0)
            throw std::invalid_argument("mate 0 reported for a position with legal moves");
        s = NormalizedScore::mate_in(v);
    } else {
        throw std::invalid_argument("unexpected score token '" + std::string(raw) + "'");
    }
    return side_to_move == chess::Color::white ? s : s.flipped();
}

}  // namespace sacscore::engine
