#include "purcell/io/config.hpp"

#include "purcell/errors.hpp"
#include "purcell/io/netlist_format.hpp"

namespace purcell::io {

FrequencyGrid GridSpec::grid() const {
    if (!(start_hz > 0.0) || !(stop_hz > start_hz) || points < 2) {
        throw DomainError("grid bounds must be positive and ordered, with at least 2 points");
    }
    return FrequencyGrid::linear_hz(start_hz, stop_hz, points);
}

GridSpec parse_grid(std::string_view text) {
    const auto r = parse_range(text);
    GridSpec g{r.start, r.stop, r.count};
    if (!(g.start_hz > 0.0) || !(g.stop_hz > g.start_hz) || g.points < 2) {
        throw ParseError("grid must read f1:f2:n with 0 < f1 < f2 and n >= 2", 0);
    }
    return g;
}

std::uint64_t RunConfig::require_seed() const {
    if (!seed) {
        throw DomainError("a seed is required for stochastic synthesis (--seed)");
    }
    return *seed;
}

}  // namespace purcell::io
