#pragma once

#include "purcell/admittance.hpp"
#include "purcell/mna.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace purcell {

/// One-port reflection measurement. Frequencies in Hz, strictly increasing.
struct ReflectionTrace {
    std::string source;
    std::vector<double> frequencies;
    std::vector<Complex> s11;

    [[nodiscard]] std::size_t size() const noexcept { return frequencies.size(); }
    /// Throws ValidationError on length mismatch, ordering or non-finite data.
    void validate() const;
};

/// Parameters of the line and setup around the resonator.
struct FitEnvironment {
    double amplitude = 1.0;
    double phase = 0.0;      // alpha, rad
    double delay = 0.0;      // tau, s
    double asymmetry = 0.0;  // phi, rad
};

/// One-sigma uncertainties, same units as the parameters.
struct FitUncertainty {
    double f0 = 0.0;
    double q_int = 0.0;
    double q_ext = 0.0;
    double q_tot = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double delay = 0.0;
    double asymmetry = 0.0;
};

struct ResonatorFit {
    std::string source;
    double f0 = 0.0;  // Hz
    double q_int = 0.0;
    double q_ext = 0.0;
    FitEnvironment environment;
    FitUncertainty sigma;
    double residual_norm = 0.0;  // ||S_model - S_data||_2
    bool converged = true;
    int iterations = 0;

    /// (1/Q_int + 1/Q_ext)^-1.
    [[nodiscard]] double q_tot() const noexcept { return 1.0 / (1.0 / q_int + 1.0 / q_ext); }
};

/// Model value at one frequency:
/// A e^{i alpha} e^{-2 pi i f tau} [1 - (2 Q_tot/Q_ext) e^{i phi} / (1 + 2 i Q_tot (f/f0 - 1))].
[[nodiscard]] Complex reflection_model(const ResonatorFit& fit, double frequency_hz);

/// Model sampled on `frequencies_hz` plus complex Gaussian noise of total
/// standard deviation `noise_level` (each quadrature gets level/sqrt 2).
[[nodiscard]] ReflectionTrace synthesize_trace(const ResonatorFit& fit,
                                               const std::vector<double>& frequencies_hz,
                                               double noise_level, std::uint64_t seed);

inline constexpr std::size_t kMinFitPoints = 20;

/// Levenberg-Marquardt fit of the reflection model. Throws NoResonanceError
/// when no dip stands out of the noise; a fit that stops without meeting
/// the convergence test is returned with converged == false.
[[nodiscard]] ResonatorFit fit_reflection(const ReflectionTrace& trace);

/// Residual Jacobian of the fit in its internal coordinates
/// [f0/f_ref - 1, ln Q_int, ln Q_ext, phi, A, alpha_mid, tau_ns]: rows are
/// Re then Im of the model at each frequency. Exposed for testing.
struct ModelJacobian {
    std::vector<double> parameters;
    double f_ref = 0.0;
    double f_mid = 0.0;
    std::vector<std::vector<double>> rows;  // 2N x 7
    std::vector<double> values;             // 2N
};
[[nodiscard]] ModelJacobian model_jacobian(const std::vector<double>& parameters, double f_ref,
                                           double f_mid, const std::vector<double>& frequencies_hz);

struct FitTableRow {
    double f0 = 0.0;
    double q_int = 0.0;
    double q_ext = 0.0;
    double q_tot = 0.0;
};

struct FitSummary {
    int count = 0;     // converged fits used
    int excluded = 0;  // fits dropped for failing convergence
    double median_q_int = 0.0;
    double median_q_ext = 0.0;
    double median_q_tot = 0.0;    // direct median of per-fit Q_tot
    double composed_q_tot = 0.0;  // (1/median Q_int + 1/median Q_ext)^-1
    double sd_q_int = 0.0;
    double sd_q_ext = 0.0;
    double sd_q_tot = 0.0;
    std::vector<FitTableRow> table;  // ascending f0
};

/// Throws DomainError when no fit converged.
[[nodiscard]] FitSummary aggregate_fits(const std::vector<ResonatorFit>& fits);

struct OverlayRow {
    double f0 = 0.0;              // Hz, measured
    double q_ext = 0.0;           // measured
    double sim_frequency = 0.0;   // Hz, f0 - offset
    double sim_value = 0.0;       // curve value there
};

struct OverlayTable {
    double offset = 0.0;  // Hz; positive when the measurement sits above the simulation
    std::vector<OverlayRow> rows;
    int outside = 0;  // fits whose shifted frequency falls outside the curve
    double rank_correlation = 0.0;  // Spearman, measured Q_ext vs simulated value
};

/// Compares measured Q_ext with the simulated curve shifted by `offset_hz`.
/// Throws DomainError when no shifted fit frequency lands inside the curve.
[[nodiscard]] OverlayTable overlay_with_simulation(const std::vector<ResonatorFit>& fits,
                                                   const QCurve& curve, double offset_hz = 0.0);

/// Frequency of the lowest measured Q_ext minus the curve's argmin frequency, Hz.
[[nodiscard]] double estimate_offset(const std::vector<ResonatorFit>& fits, const QCurve& curve);

/// Spearman rank correlation with average ranks for ties.
[[nodiscard]] double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace purcell
