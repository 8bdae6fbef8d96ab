#pragma once

#include "sacscore/chess/position.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace sacscore::chess {

class SanError : public std::runtime_error {
public:
    enum class Kind { unparseable, illegal, ambiguous };

    SanError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Resolves a SAN token ("Nf3", "exd5", "O-O", "e8=Q+", "Qh7+") against the
/// legal moves of `p`. The capture marker and check suffixes are optional;
/// annotation glyphs ("!", "?") are ignored.
Move parse_san(const Position& p, std::string_view token);

/// Standard SAN for a legal move, with minimal disambiguation and a
/// trailing '+' or '#'.
std::string to_san(const Position& p, const Move& m);

}  // namespace sacscore::chess
