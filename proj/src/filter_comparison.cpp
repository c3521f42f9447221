#include "purcell/filter_comparison.hpp"

#include "purcell/errors.hpp"

#include <cmath>
#include <limits>

namespace purcell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> inductances_for(double total_capacitance,
                                    const std::vector<double>& frequencies_hz) {
    std::vector<double> out;
    out.reserve(frequencies_hz.size());
    for (double f : frequencies_hz) {
        if (!(f > 0.0)) throw DomainError("sweep frequencies must be positive");
        out.push_back(inductance_for(f, total_capacitance));
    }
    return out;
}

}  // namespace

std::vector<double> qubit_inductances_for(const UnitCellSpec& cell,
                                          const std::vector<double>& frequencies_hz, int qubit) {
    if (qubit < 0 || qubit >= static_cast<int>(cell.qubits.size())) {
        throw DomainError("qubit index out of range");
    }
    const auto& q = cell.qubits[static_cast<std::size_t>(qubit)];
    return inductances_for(q.capacitance + q.coupling + q.filter_coupling, frequencies_hz);
}

std::vector<double> resonator_inductances_for(const UnitCellSpec& cell,
                                              const std::vector<double>& frequencies_hz,
                                              int resonator) {
    if (resonator < 0 || resonator >= static_cast<int>(cell.resonators.size())) {
        throw DomainError("resonator index out of range");
    }
    const auto& r = cell.resonators[static_cast<std::size_t>(resonator)];
    double total = r.capacitance + r.coupling;
    for (const auto& q : cell.qubits) {
        if (q.resonator == resonator) total += q.coupling;
    }
    return inductances_for(total, frequencies_hz);
}

FilterComparison compare_with_without_filter(const UnitCellSpec& cell,
                                             const std::vector<double>& inductances, int qubit,
                                             std::optional<Band> band) {
    if (qubit < 0 || qubit >= static_cast<int>(cell.qubits.size())) {
        throw DomainError("qubit index out of range");
    }
    const auto map = branch_map(cell);
    const Subsystem track{SubsystemKind::qubit, qubit};
    const auto label = names::qubit_inductor(qubit);

    FilterComparison out;
    out.with_filter = sweep_element(build_unit_cell(cell), label, inductances, track, map, band);
    out.without_filter =
        sweep_element(build_no_filter_variant(cell), label, inductances, track, map, band);

    for (std::size_t i = 0; i < inductances.size(); ++i) {
        const auto& a = out.with_filter.points[i].mode;
        const auto& b = out.without_filter.points[i].mode;
        const double qa = a ? a->q : kNaN;
        const double qb = b ? b->q : kNaN;
        out.frequency_hz.push_back(a ? a->frequency_hz() : kNaN);
        out.q_with.push_back(qa);
        out.q_without.push_back(qb);
        out.suppression_db.push_back(10.0 * std::log10(qa / qb));
    }
    return out;
}

}  // namespace purcell
