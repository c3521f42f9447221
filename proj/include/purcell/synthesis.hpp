#pragma once

#include "purcell/admittance.hpp"
#include "purcell/eigenmode.hpp"
#include "purcell/netlist.hpp"

#include <optional>
#include <vector>

namespace purcell {

// ---------------------------------------------------------------------------
// Patch sizing

struct PatchSpec {
    double side = 0.0;              // m
    double frequency = 0.0;         // Hz
    double permittivity = 1.0;
    double rho = 0.5;               // in (0, 1]
};

/// a = rho 2c / (3 f sqrt(eps_r)) for the triangular patch.
[[nodiscard]] double patch_side(double frequency_hz, double permittivity, double rho);
/// Inverse of patch_side.
[[nodiscard]] double patch_frequency(double side, double permittivity, double rho);
/// Fills the side of a spec from frequency, permittivity and rho.
[[nodiscard]] PatchSpec make_patch(double frequency_hz, double permittivity, double rho);

// ---------------------------------------------------------------------------
// Unit cell

inline constexpr double kDefaultCouplingCapacitance = 1.73e-15;
inline constexpr double kDefaultResonatorInductance = 1.8e-9;
inline constexpr double kDefaultQubitInductance = 11.5e-9;
inline constexpr double kDefaultQubitFrequency = 4.43e9;
inline constexpr double kDefaultStubInductance = 0.1e-9;
inline constexpr double kDefaultQubitCoupling = 8.0e-15;
inline constexpr double kDefaultQubitFilterStray = 0.3e-15;

/// Lumped single-mode equivalent of the patch filter. The filter node is
/// shunted by L and C and tapped to the output port through the stub.
struct FilterElements {
    double inductance = 0.0;       // L_f
    double capacitance = 0.0;      // C_f
    double stub_inductance = kDefaultStubInductance;
    double load_resistance = 50.0;  // output port reference impedance

    friend bool operator==(const FilterElements&, const FilterElements&) = default;
};

struct ResonatorBranch {
    double capacitance = 0.0;  // shunt C, coupling capacitors not included
    double inductance = kDefaultResonatorInductance;
    double coupling = kDefaultCouplingCapacitance;  // Cc to the filter node

    friend bool operator==(const ResonatorBranch&, const ResonatorBranch&) = default;
};

/// Linear qubit mode hanging off one resonator. `filter_coupling` is the
/// small direct capacitance between qubit pad and filter (or the resonator's
/// output termination when the filter is absent).
struct QubitBranch {
    int resonator = 0;
    double capacitance = 0.0;
    double inductance = kDefaultQubitInductance;
    double coupling = kDefaultQubitCoupling;
    double filter_coupling = kDefaultQubitFilterStray;

    friend bool operator==(const QubitBranch&, const QubitBranch&) = default;
};

struct UnitCellSpec {
    FilterElements filter;
    std::vector<ResonatorBranch> resonators;
    std::vector<QubitBranch> qubits;

    /// Throws ValidationError on an empty or oversized cell, non-positive
    /// values, or a qubit pointing at a missing resonator.
    void validate() const;

    friend bool operator==(const UnitCellSpec&, const UnitCellSpec&) = default;
};

inline constexpr int kMaxResonatorsPerCell = 9;

/// Element, node and port names used by the builders.
namespace names {
inline constexpr const char* filter_node = "filter";
inline constexpr const char* output_node = "out";
inline constexpr const char* output_port = "P_out";
[[nodiscard]] std::string resonator_node(int k);
[[nodiscard]] std::string qubit_node(int k);
[[nodiscard]] std::string termination_node(int k);
[[nodiscard]] std::string termination_port(int k);
[[nodiscard]] std::string input_port(int k);
[[nodiscard]] std::string resonator_inductor(int k);
[[nodiscard]] std::string resonator_capacitor(int k);
[[nodiscard]] std::string qubit_inductor(int k);
[[nodiscard]] std::string qubit_capacitor(int k);
}  // namespace names

[[nodiscard]] Netlist build_unit_cell(const UnitCellSpec& spec);
/// Same branches with the filter removed: each Cc (and qubit stray) lands on
/// a node terminated by its own 50 ohm port.
[[nodiscard]] Netlist build_no_filter_variant(const UnitCellSpec& spec);
/// Element-label -> subsystem map for either variant.
[[nodiscard]] BranchMap branch_map(const UnitCellSpec& spec);

/// Standalone filter as seen from `n_inputs` weakly coupled 50 ohm input
/// ports (the "PCB only" measurement of the passband).
[[nodiscard]] Netlist build_filter_probe(const FilterElements& filter, int n_inputs = 1,
                                         double coupling = kDefaultCouplingCapacitance);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationOptions {
    double stub_inductance = kDefaultStubInductance;
    double load_resistance = 50.0;
    double coupling = kDefaultCouplingCapacitance;  // input probe coupling
    int grid_points = 2001;
    std::optional<double> initial_capacitance;  // warm start for C_f
};

struct FilterCalibration {
    double target_center = 0.0;     // Hz
    double target_bandwidth = 0.0;  // Hz
    FilterElements elements;
    double loading_conductance = 0.0;  // S, Re[Y] of everything but L_f seen from the filter node
    double achieved_center = 0.0;      // Hz, from passband_metrics
    double achieved_bandwidth = 0.0;   // Hz
    double achieved_q = 0.0;
    int iterations = 0;

    [[nodiscard]] double target_q() const noexcept { return target_center / target_bandwidth; }
    /// 1/(2 pi sqrt(L_f C_f)).
    [[nodiscard]] double bare_frequency() const noexcept;
};

/// Root-finds C_f so that the passband measured on the filter probe has
/// Q = f_center/bandwidth, with L_f resonating C_f at f_center. Stub and
/// probe loading pull the measured center up by a fraction of a percent.
/// Throws CalibrationError with the closest Q reached when the target is
/// out of reach.
[[nodiscard]] FilterCalibration calibrate_filter(double f_center_hz, double bandwidth_hz,
                                                 const CalibrationOptions& options = {});

/// Passband of the filter probe over [max(0.05 fc, fc - 4 bw), fc + 4 bw].
[[nodiscard]] PassbandMetrics measure_filter(const FilterElements& filter, double f_center_hz,
                                             double bandwidth_hz, int grid_points = 2001,
                                             double coupling = kDefaultCouplingCapacitance);

struct UnitCellOptions {
    int n_resonators = 1;
    bool with_qubits = true;
    double resonator_inductance = kDefaultResonatorInductance;
    double coupling = kDefaultCouplingCapacitance;
    double qubit_inductance = kDefaultQubitInductance;
    double qubit_frequency = kDefaultQubitFrequency;  // Hz, first qubit
    double qubit_spacing = 50e6;                      // Hz between successive qubits
    double qubit_coupling = kDefaultQubitCoupling;
    double qubit_filter_stray = kDefaultQubitFilterStray;
};

/// Resonator frequency k of n spread uniformly across the passband:
/// fc - bw/2 + bw (k + 1/2)/n.
[[nodiscard]] double staggered_frequency(double f_center_hz, double bandwidth_hz, int k, int n);

/// Unit cell around a calibrated filter. Shunt capacitances are solved from
/// the target frequencies with the attached coupling capacitors subtracted.
[[nodiscard]] UnitCellSpec default_unit_cell(const FilterCalibration& calibration,
                                             const UnitCellOptions& options = {});

/// Total capacitance that puts an LC at `frequency_hz`.
[[nodiscard]] double capacitance_for(double frequency_hz, double inductance);
/// Inductance that puts an LC of total capacitance `capacitance` at `frequency_hz`.
[[nodiscard]] double inductance_for(double frequency_hz, double capacitance);

// ---------------------------------------------------------------------------
// Tiling

struct TiledCell {
    UnitCellSpec cell;
    int used = 0;  // resonators wired to qubits; the rest are spare
};

struct TilingMap {
    std::vector<TiledCell> cells;

    void validate() const;
    [[nodiscard]] int available() const;
    [[nodiscard]] int used() const;
};

struct TiledBoard {
    std::vector<Netlist> netlists;
    int outputs = 0;
    int available_ports = 0;
    int used_ports = 0;
};

/// Independent netlists, one per cell; no inter-cell coupling.
[[nodiscard]] TiledBoard build_tiled(const TilingMap& map);

}  // namespace purcell
