#pragma once

#include "purcell/eigenmode.hpp"
#include "purcell/synthesis.hpp"

#include <optional>
#include <vector>

namespace purcell {

/// Qubit-mode quality factor with and without the filter, point by point
/// over a sweep of the qubit inductance.
struct FilterComparison {
    SweepTrace with_filter;
    SweepTrace without_filter;
    std::vector<double> frequency_hz;    // qubit mode frequency with the filter, NaN at gaps
    std::vector<double> q_with;          // NaN at gaps
    std::vector<double> q_without;
    std::vector<double> suppression_db;  // 10 log10(q_with / q_without)
};

/// Sweeps qubit `qubit` of `cell` across `inductances` in both variants.
[[nodiscard]] FilterComparison compare_with_without_filter(const UnitCellSpec& cell,
                                                           const std::vector<double>& inductances,
                                                           int qubit = 0,
                                                           std::optional<Band> band = std::nullopt);

/// Inductance values putting qubit `qubit` of `cell` at the given bare
/// frequencies (its total capacitance held fixed).
[[nodiscard]] std::vector<double> qubit_inductances_for(const UnitCellSpec& cell,
                                                        const std::vector<double>& frequencies_hz,
                                                        int qubit = 0);

/// Same for resonator `resonator`.
[[nodiscard]] std::vector<double> resonator_inductances_for(
    const UnitCellSpec& cell, const std::vector<double>& frequencies_hz, int resonator = 0);

}  // namespace purcell
