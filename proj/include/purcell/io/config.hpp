#pragma once

#include "purcell/netlist.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace purcell::io {

/// Linear frequency grid in Hz.
struct GridSpec {
    double start_hz = 4e9;
    double stop_hz = 15e9;
    int points = 2001;

    [[nodiscard]] FrequencyGrid grid() const;
};

/// "f1:f2:n" with optional SI prefixes ("4G:15G:2001"). Throws ParseError.
[[nodiscard]] GridSpec parse_grid(std::string_view text);

/// Shared command parameters.
struct RunConfig {
    GridSpec grid;
    std::string output;  // empty: stdout
    std::string svg;     // empty: no chart
    double offset_hz = 0.0;
    std::optional<std::uint64_t> seed;

    /// Stochastic commands call this; there is no ambient entropy.
    [[nodiscard]] std::uint64_t require_seed() const;
};

}  // namespace purcell::io
