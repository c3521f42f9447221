#pragma once

#include "purcell/mna.hpp"
#include "purcell/netlist.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace purcell {

/// Frequency-indexed quality-factor trace. Values are either absolute Q or
/// Q/C = omega/Re[Y] (ohm rad/s); NaN marks samples where the quantity is
/// undefined (pole, or Re[Y] <= 0).
struct QCurve {
    std::vector<double> omegas;
    std::vector<double> values;
    bool per_capacitance = true;   // omega/Re[Y] rather than absolute Q
    bool minimum_normalized = false;

    [[nodiscard]] std::size_t size() const noexcept { return omegas.size(); }
    /// Linear interpolation; throws DomainError outside the sampled span.
    [[nodiscard]] double value_at(double omega) const;
    /// Index of the smallest defined value, nullopt when none is defined.
    [[nodiscard]] std::optional<std::size_t> argmin() const;
};

/// Q = omega_r C / Re[Y]. Throws UndefinedQError when Re[Y] <= 0.
[[nodiscard]] double q_from_admittance(double omega_r, double capacitance, Complex y);

/// omega/Re[Y(omega)] at `port` over the grid, not normalized.
[[nodiscard]] QCurve q_per_capacitance_curve(const Netlist& net, std::string_view port,
                                             const FrequencyGrid& grid);

/// omega/Re[Y] divided by its grid minimum. Throws NoPassbandError when no
/// sample has Re[Y] > 0.
[[nodiscard]] QCurve normalized_q_curve(const Netlist& net, std::string_view port,
                                        const FrequencyGrid& grid);

/// Divides a curve by its smallest defined sample.
[[nodiscard]] QCurve normalize_to_minimum(QCurve curve);

struct PassbandMetrics {
    double center = 0.0;       // rad/s, parabolic refinement of the argmin
    double bandwidth = 0.0;    // rad/s between the 3 dB (factor 2) crossings; NaN if partial
    double q_filter = 0.0;     // center / bandwidth; NaN if partial
    double lower_edge = 0.0;   // rad/s, NaN when not inside the grid
    double upper_edge = 0.0;
    bool lower_found = false;
    bool upper_found = false;

    [[nodiscard]] bool complete() const noexcept { return lower_found && upper_found; }
};

/// Throws NoPassbandError when the global minimum sits on a grid edge.
[[nodiscard]] PassbandMetrics passband_metrics(const QCurve& curve);

/// 10 log10(value(stop)/value(pass)) with linear interpolation between samples.
[[nodiscard]] double filtering_ratio_db(const QCurve& curve, double omega_stop, double omega_pass);

/// Resonance of a shunt inductor placed across a probe port, and the
/// admittance-route quality factor at that resonance.
struct ModalResonance {
    double omega = 0.0;         // where Im[Y_port] = 1/(omega L)
    double capacitance = 0.0;   // effective shunt capacitance from the susceptance slope
    Complex admittance{};
    double q = 0.0;
};

/// `net` must carry the probe port in place of the inductor (see
/// Netlist::with_element_as_port). `omega_guess` seeds the search.
[[nodiscard]] ModalResonance modal_resonance(const Netlist& net, std::string_view port,
                                             double inductance, double omega_guess);

}  // namespace purcell
