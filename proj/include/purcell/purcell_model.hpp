#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace purcell {

/// Dispersive readout chain of one qubit. Angular frequencies in rad/s.
struct ReadoutChainParams {
    double omega_qb = 0.0;
    double omega_res = 0.0;
    double g = 0.0;          // rad/s, may be zero
    double q_ext = 0.0;
    double capacitance = 0.0;           // resonator shunt C, F (informational)
    double coupling_capacitance = 0.0;  // Cc, F (informational)
    double z0 = 50.0;
    /// Frequency at which q_ext was evaluated. Unset: omega_res.
    std::optional<double> q_ext_omega;

    [[nodiscard]] double detuning() const noexcept { return omega_qb - omega_res; }
    /// kappa_ext = omega/Q_ext at the frequency q_ext belongs to.
    [[nodiscard]] double kappa() const;
    [[nodiscard]] double kappa_evaluated_at() const noexcept {
        return q_ext_omega.value_or(omega_res);
    }
};

/// Gamma_1 >= (g/Delta)^2 kappa_ext, 1/s. Throws DomainError at zero detuning.
[[nodiscard]] double purcell_bound(const ReadoutChainParams& p);

/// T1 = Q/omega, seconds.
[[nodiscard]] double t1_radiative(double q, double omega);
/// Inverse: Q = omega T1.
[[nodiscard]] double q_from_t1(double t1, double omega);

/// Q_ext = C/(Z0 Cc^2 omega) for weak capacitive coupling to a matched line.
[[nodiscard]] double direct_coupling_qext(double capacitance, double coupling, double z0,
                                          double omega);

/// kappa = omega/Q_ext, rad/s. Q_ext = +inf gives 0.
[[nodiscard]] double kappa_ext(double omega_res, double q_ext);

struct CoherenceSample {
    std::string qubit_id;
    double t1 = 0.0;  // s
    std::optional<double> t2_ramsey;
    std::optional<double> t2_echo;

    /// Positive times, T2 <= 2 T1 (with 1e-9 relative slack).
    void validate() const;
};

struct LimitReport {
    double limit = 0.0;
    int above = 0;
    int at_or_below = 0;
    double min_margin = 0.0;     // min(T1 - limit), s
    double median_margin = 0.0;  // s
    double median_t1 = 0.0;
    double median_ratio = 0.0;   // median(T1/limit)
    std::vector<std::string> below_ids;
};

/// Partitions samples by T1 > limit; T1 == limit counts as not above.
[[nodiscard]] LimitReport validate_t1_against_limit(const std::vector<CoherenceSample>& samples,
                                                    double limit);

/// n normally scattered T1 values rescaled so that the sample median and the
/// sample standard deviation (n-1) equal the requested values exactly.
[[nodiscard]] std::vector<CoherenceSample> synthetic_t1_sample(int n, double median, double sd,
                                                               std::uint64_t seed);

[[nodiscard]] double median(std::vector<double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
[[nodiscard]] double sample_sd(const std::vector<double>& values);

}  // namespace purcell
