#include "purcell/synthesis.hpp"

#include "purcell/errors.hpp"
#include "purcell/units.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace purcell {

double patch_side(double frequency_hz, double permittivity, double rho) {
    if (!(frequency_hz > 0.0) || !(permittivity > 0.0) || !(rho > 0.0)) {
        throw DomainError("patch sizing needs positive frequency, permittivity and rho");
    }
    return rho * 2.0 * kSpeedOfLight / (3.0 * frequency_hz * std::sqrt(permittivity));
}

double patch_frequency(double side, double permittivity, double rho) {
    if (!(side > 0.0) || !(permittivity > 0.0) || !(rho > 0.0)) {
        throw DomainError("patch sizing needs positive side, permittivity and rho");
    }
    return rho * 2.0 * kSpeedOfLight / (3.0 * side * std::sqrt(permittivity));
}

PatchSpec make_patch(double frequency_hz, double permittivity, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) {
        throw DomainError("rho must lie in (0, 1]");
    }
    return PatchSpec{patch_side(frequency_hz, permittivity, rho), frequency_hz, permittivity, rho};
}

namespace names {
std::string resonator_node(int k) { return "res_" + std::to_string(k); }
std::string qubit_node(int k) { return "qb_" + std::to_string(k); }
std::string termination_node(int k) { return "term_" + std::to_string(k); }
std::string termination_port(int k) { return "P_" + std::to_string(k); }
std::string input_port(int k) { return "P_in_" + std::to_string(k); }
std::string resonator_inductor(int k) { return "Lr_" + std::to_string(k); }
std::string resonator_capacitor(int k) { return "Cr_" + std::to_string(k); }
std::string qubit_inductor(int k) { return "Lq_" + std::to_string(k); }
std::string qubit_capacitor(int k) { return "Cq_" + std::to_string(k); }
}  // namespace names

namespace {

std::string idx(const char* prefix, int k) { return prefix + std::to_string(k); }

void add_branches(Netlist& net, const UnitCellSpec& spec, bool with_filter) {
    for (std::size_t i = 0; i < spec.resonators.size(); ++i) {
        const int k = static_cast<int>(i);
        const auto& r = spec.resonators[i];
        const auto node = names::resonator_node(k);
        const auto target =
            with_filter ? std::string(names::filter_node) : names::termination_node(k);
        if (!with_filter) {
            net.add_port(names::termination_port(k), target, "gnd", spec.filter.load_resistance);
        }
        net.add_capacitor(names::resonator_capacitor(k), node, "gnd", r.capacitance);
        net.add_inductor(names::resonator_inductor(k), node, "gnd", r.inductance);
        net.add_capacitor(idx("Cc_", k), node, target, r.coupling);
    }
    for (std::size_t i = 0; i < spec.qubits.size(); ++i) {
        const int k = static_cast<int>(i);
        const auto& q = spec.qubits[i];
        const auto node = names::qubit_node(k);
        const auto stray_target = with_filter ? std::string(names::filter_node)
                                              : names::termination_node(q.resonator);
        net.add_capacitor(names::qubit_capacitor(k), node, "gnd", q.capacitance);
        net.add_inductor(names::qubit_inductor(k), node, "gnd", q.inductance);
        net.add_capacitor(idx("Cg_", k), node, names::resonator_node(q.resonator), q.coupling);
        net.add_capacitor(idx("Cqf_", k), node, stray_target, q.filter_coupling);
    }
}

void add_filter(Netlist& net, const FilterElements& f) {
    net.add_capacitor("Cf", names::filter_node, "gnd", f.capacitance);
    net.add_inductor("Lf", names::filter_node, "gnd", f.inductance);
    net.add_inductor("Lstub", names::filter_node, names::output_node, f.stub_inductance);
    net.add_port(names::output_port, names::output_node, "gnd", f.load_resistance);
}

void require_positive(double v, const std::string& what, std::vector<std::string>& bad) {
    if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(what);
}

}  // namespace

void UnitCellSpec::validate() const {
    const auto n = static_cast<int>(resonators.size());
    if (n < 1 || n > kMaxResonatorsPerCell) {
        throw ValidationError("a unit cell holds 1 to " + std::to_string(kMaxResonatorsPerCell) +
                              " resonators, got " + std::to_string(n));
    }
    std::vector<std::string> bad;
    require_positive(filter.inductance, "Lf", bad);
    require_positive(filter.capacitance, "Cf", bad);
    require_positive(filter.stub_inductance, "Lstub", bad);
    require_positive(filter.load_resistance, names::output_port, bad);
    for (int k = 0; k < n; ++k) {
        const auto& r = resonators[static_cast<std::size_t>(k)];
        require_positive(r.capacitance, names::resonator_capacitor(k), bad);
        require_positive(r.inductance, names::resonator_inductor(k), bad);
        require_positive(r.coupling, idx("Cc_", k), bad);
    }
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const int k = static_cast<int>(i);
        const auto& q = qubits[i];
        require_positive(q.capacitance, names::qubit_capacitor(k), bad);
        require_positive(q.inductance, names::qubit_inductor(k), bad);
        require_positive(q.coupling, idx("Cg_", k), bad);
        require_positive(q.filter_coupling, idx("Cqf_", k), bad);
        if (q.resonator < 0 || q.resonator >= n) bad.push_back(names::qubit_node(k));
    }
    if (!bad.empty()) {
        throw ValidationError("invalid unit cell values", bad);
    }
}

Netlist build_unit_cell(const UnitCellSpec& spec) {
    spec.validate();
    Netlist net;
    add_filter(net, spec.filter);
    add_branches(net, spec, true);
    net.validate_with_ports();
    return net;
}

Netlist build_no_filter_variant(const UnitCellSpec& spec) {
    spec.validate();
    Netlist net;
    add_branches(net, spec, false);
    net.validate_with_ports();
    return net;
}

BranchMap branch_map(const UnitCellSpec& spec) {
    BranchMap map;
    const Subsystem filter{SubsystemKind::filter, 0};
    map["Cf"] = filter;
    map["Lf"] = filter;
    map["Lstub"] = filter;
    for (std::size_t i = 0; i < spec.resonators.size(); ++i) {
        const int k = static_cast<int>(i);
        map[names::resonator_capacitor(k)] = Subsystem{SubsystemKind::resonator, k};
        map[names::resonator_inductor(k)] = Subsystem{SubsystemKind::resonator, k};
    }
    for (std::size_t i = 0; i < spec.qubits.size(); ++i) {
        const int k = static_cast<int>(i);
        map[names::qubit_capacitor(k)] = Subsystem{SubsystemKind::qubit, k};
        map[names::qubit_inductor(k)] = Subsystem{SubsystemKind::qubit, k};
    }
    return map;
}

Netlist build_filter_probe(const FilterElements& filter, int n_inputs, double coupling) {
    if (n_inputs < 1) {
        throw ValidationError("filter probe needs at least one input port");
    }
    Netlist net;
    add_filter(net, filter);
    for (int k = 0; k < n_inputs; ++k) {
        const auto node = idx("in_", k);
        net.add_capacitor(idx("Cin_", k), node, names::filter_node, coupling);
        net.add_port(names::input_port(k), node, "gnd", filter.load_resistance);
    }
    net.validate_with_ports();
    return net;
}

double FilterCalibration::bare_frequency() const noexcept {
    return 1.0 / (kTwoPi * std::sqrt(elements.inductance * elements.capacitance));
}

double capacitance_for(double frequency_hz, double inductance) {
    const double w = to_angular(frequency_hz);
    return 1.0 / (w * w * inductance);
}

double inductance_for(double frequency_hz, double capacitance) {
    const double w = to_angular(frequency_hz);
    return 1.0 / (w * w * capacitance);
}

PassbandMetrics measure_filter(const FilterElements& filter, double f_center_hz,
                               double bandwidth_hz, int grid_points, double coupling) {
    const double lo = std::max(0.05 * f_center_hz, f_center_hz - 4.0 * bandwidth_hz);
    const double hi = f_center_hz + 4.0 * bandwidth_hz;
    const auto grid = FrequencyGrid::linear_hz(lo, hi, grid_points);
    const auto probe = build_filter_probe(filter, 1, coupling);
    return passband_metrics(normalized_q_curve(probe, names::input_port(0), grid));
}

namespace {

double loading_admittance_real(const FilterElements& f, double omega_c, double coupling) {
    const auto probe = build_filter_probe(f, 1, coupling).with_element_as_port("Lf", "P_node");
    const auto r = port_admittance(probe, "P_node", omega_c);
    if (r.pole) {
        throw CalibrationError("filter node admittance undefined: " + r.diagnostic, 0.0);
    }
    return r.admittance.real();
}

}  // namespace

FilterCalibration calibrate_filter(double f_center_hz, double bandwidth_hz,
                                   const CalibrationOptions& options) {
    if (!(f_center_hz > 0.0) || !(bandwidth_hz > 0.0) || !(bandwidth_hz <= f_center_hz)) {
        throw DomainError("calibration needs 0 < bandwidth <= f_center");
    }
    const double wc = to_angular(f_center_hz);
    const double q_target = f_center_hz / bandwidth_hz;

    FilterElements f;
    f.stub_inductance = options.stub_inductance;
    f.load_resistance = options.load_resistance;

    const double r = options.load_resistance;
    const double x = wc * options.stub_inductance;
    const double g_load = r / (r * r + x * x);

    double best_q = std::numeric_limits<double>::quiet_NaN();
    int evaluations = 0;
    auto measure = [&](double log_c) {
        ++evaluations;
        FilterElements trial = f;
        trial.capacitance = std::exp(log_c);
        trial.inductance = 1.0 / (wc * wc * trial.capacitance);
        double q = std::numeric_limits<double>::quiet_NaN();
        try {
            q = measure_filter(trial, f_center_hz, bandwidth_hz, options.grid_points,
                               options.coupling)
                    .q_filter;
        } catch (const NoPassbandError&) {
        }
        if (std::isfinite(q) &&
            (!std::isfinite(best_q) || std::abs(std::log(q / q_target)) <
                                           std::abs(std::log(best_q / q_target)))) {
            best_q = q;
        }
        return q;
    };
    auto residual = [&](double log_c) {
        const double q = measure(log_c);
        if (!std::isfinite(q)) {
            throw CalibrationError("passband not measurable during calibration", best_q);
        }
        return std::log(q / q_target);
    };

    // Single-pole estimate Q = omega C / G as the starting point.
    double x0 = std::log(options.initial_capacitance.value_or(q_target * g_load / wc));
    double f0 = residual(x0);
    double step = f0 < 0.0 ? std::log(2.0) : -std::log(2.0);
    double x1 = x0 + step;
    double f1 = residual(x1);
    for (int i = 0; f0 * f1 > 0.0; ++i) {
        if (i > 40) {
            throw CalibrationError("could not bracket the target loaded Q", best_q);
        }
        x0 = x1;
        f0 = f1;
        x1 += step;
        f1 = residual(x1);
    }
    double lo = std::min(x0, x1), hi = std::max(x0, x1);
    double flo = x0 < x1 ? f0 : f1, fhi = x0 < x1 ? f1 : f0;

    double root = lo;
    if (flo == 0.0) {
        root = lo;
    } else if (fhi == 0.0) {
        root = hi;
    } else {
        std::uintmax_t max_iter = 100;
        const auto [a, b] = boost::math::tools::toms748_solve(
            residual, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(44), max_iter);
        root = 0.5 * (a + b);
    }

    FilterCalibration out;
    out.target_center = f_center_hz;
    out.target_bandwidth = bandwidth_hz;
    out.elements = f;
    out.elements.capacitance = std::exp(root);
    out.elements.inductance = 1.0 / (wc * wc * out.elements.capacitance);
    out.loading_conductance = loading_admittance_real(out.elements, wc, options.coupling);
    const auto m = measure_filter(out.elements, f_center_hz, bandwidth_hz, options.grid_points,
                                  options.coupling);
    out.achieved_center = to_hz(m.center);
    out.achieved_bandwidth = to_hz(m.bandwidth);
    out.achieved_q = m.q_filter;
    out.iterations = evaluations;
    if (!(std::abs(out.achieved_q / q_target - 1.0) <= 1e-3)) {
        throw CalibrationError("calibration did not reach the target loaded Q", out.achieved_q);
    }
    return out;
}

double staggered_frequency(double f_center_hz, double bandwidth_hz, int k, int n) {
    if (n < 1 || k < 0 || k >= n) {
        throw DomainError("resonator index out of range");
    }
    return f_center_hz - 0.5 * bandwidth_hz + bandwidth_hz * (k + 0.5) / n;
}

UnitCellSpec default_unit_cell(const FilterCalibration& calibration,
                               const UnitCellOptions& options) {
    if (options.n_resonators < 1 || options.n_resonators > kMaxResonatorsPerCell) {
        throw ValidationError("a unit cell holds 1 to " + std::to_string(kMaxResonatorsPerCell) +
                              " resonators, got " + std::to_string(options.n_resonators));
    }
    UnitCellSpec spec;
    spec.filter = calibration.elements;
    const double cg = options.with_qubits ? options.qubit_coupling : 0.0;
    for (int k = 0; k < options.n_resonators; ++k) {
        const double f = staggered_frequency(calibration.target_center,
                                             calibration.target_bandwidth, k,
                                             options.n_resonators);
        ResonatorBranch r;
        r.inductance = options.resonator_inductance;
        r.coupling = options.coupling;
        r.capacitance = capacitance_for(f, r.inductance) - r.coupling - cg;
        spec.resonators.push_back(r);
    }
    if (options.with_qubits) {
        for (int k = 0; k < options.n_resonators; ++k) {
            QubitBranch q;
            q.resonator = k;
            q.inductance = options.qubit_inductance;
            q.coupling = options.qubit_coupling;
            q.filter_coupling = options.qubit_filter_stray;
            const double f = options.qubit_frequency + k * options.qubit_spacing;
            q.capacitance = capacitance_for(f, q.inductance) - q.coupling - q.filter_coupling;
            spec.qubits.push_back(q);
        }
    }
    spec.validate();
    return spec;
}

void TilingMap::validate() const {
    if (cells.empty()) {
        throw ValidationError("tiling map has no cells");
    }
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto n = static_cast<int>(cells[i].cell.resonators.size());
        if (n < 1 || n > kMaxResonatorsPerCell || cells[i].used < 0 || cells[i].used > n) {
            bad.push_back("cell_" + std::to_string(i));
        }
    }
    if (!bad.empty()) {
        throw ValidationError("tiling map cell counts out of range (1 to " +
                                  std::to_string(kMaxResonatorsPerCell) + " per cell)",
                              bad);
    }
}

int TilingMap::available() const {
    int n = 0;
    for (const auto& c : cells) n += static_cast<int>(c.cell.resonators.size());
    return n;
}

int TilingMap::used() const {
    int n = 0;
    for (const auto& c : cells) n += c.used;
    return n;
}

TiledBoard build_tiled(const TilingMap& map) {
    map.validate();
    TiledBoard board;
    for (const auto& c : map.cells) {
        board.netlists.push_back(build_unit_cell(c.cell));
    }
    board.outputs = static_cast<int>(map.cells.size());
    board.available_ports = map.available();
    board.used_ports = map.used();
    return board;
}

}  // namespace purcell
