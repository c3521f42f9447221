#include "purcell/purcell_model.hpp"

#include "purcell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace purcell {

double ReadoutChainParams::kappa() const { return kappa_ext(kappa_evaluated_at(), q_ext); }

double purcell_bound(const ReadoutChainParams& p) {
    if (!(p.omega_qb > 0.0) || !(p.omega_res > 0.0) || !(p.q_ext > 0.0) || p.g < 0.0) {
        throw DomainError("purcell_bound needs positive frequencies and Q_ext, g >= 0");
    }
    const double delta = p.detuning();
    if (delta == 0.0) {
        throw DomainError("purcell_bound is undefined at zero detuning");
    }
    const double ratio = p.g / delta;
    return ratio * ratio * p.kappa();
}

double t1_radiative(double q, double omega) {
    if (!(q > 0.0) || !(omega > 0.0)) {
        throw DomainError("t1_radiative needs positive Q and frequency");
    }
    return q / omega;
}

double q_from_t1(double t1, double omega) {
    if (!(t1 > 0.0) || !(omega > 0.0)) {
        throw DomainError("q_from_t1 needs positive T1 and frequency");
    }
    return omega * t1;
}

double direct_coupling_qext(double capacitance, double coupling, double z0, double omega) {
    if (!(capacitance > 0.0) || !(coupling > 0.0) || !(z0 > 0.0) || !(omega > 0.0)) {
        throw DomainError("direct_coupling_qext needs positive inputs");
    }
    return capacitance / (z0 * coupling * coupling * omega);
}

double kappa_ext(double omega_res, double q_ext) {
    if (!(omega_res > 0.0) || !(q_ext > 0.0)) {
        throw DomainError("kappa_ext needs positive frequency and Q_ext");
    }
    return omega_res / q_ext;
}

void CoherenceSample::validate() const {
    if (!(t1 > 0.0)) {
        throw ValidationError("T1 must be positive", {qubit_id});
    }
    const double bound = 2.0 * t1 * (1.0 + 1e-9);
    for (const auto& t2 : {t2_ramsey, t2_echo}) {
        if (t2 && (!(*t2 > 0.0) || *t2 > bound)) {
            throw ValidationError("T2 must be positive and at most 2 T1", {qubit_id});
        }
    }
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw DomainError("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double sample_sd(const std::vector<double>& values) {
    if (values.empty()) {
        throw DomainError("standard deviation of an empty set");
    }
    if (values.size() == 1) return 0.0;
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

LimitReport validate_t1_against_limit(const std::vector<CoherenceSample>& samples, double limit) {
    if (samples.empty()) {
        throw DomainError("no coherence samples to validate");
    }
    if (!(limit > 0.0)) {
        throw DomainError("T1 limit must be positive");
    }
    LimitReport report;
    report.limit = limit;
    std::vector<double> margins, t1s, ratios;
    for (const auto& s : samples) {
        s.validate();
        if (s.t1 > limit) {
            ++report.above;
        } else {
            ++report.at_or_below;
            report.below_ids.push_back(s.qubit_id);
        }
        margins.push_back(s.t1 - limit);
        t1s.push_back(s.t1);
        ratios.push_back(s.t1 / limit);
    }
    report.min_margin = *std::min_element(margins.begin(), margins.end());
    report.median_margin = median(margins);
    report.median_t1 = median(t1s);
    report.median_ratio = median(ratios);
    return report;
}

std::vector<CoherenceSample> synthetic_t1_sample(int n, double median_t1, double sd,
                                                 std::uint64_t seed) {
    if (n < 2 || !(median_t1 > 0.0) || !(sd > 0.0)) {
        throw DomainError("synthetic sample needs n >= 2 and positive median and sd");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = normal(rng);
    const double zm = median(z);
    const double zs = sample_sd(z);

    std::vector<CoherenceSample> out;
    for (int i = 0; i < n; ++i) {
        const double t1 = median_t1 + sd * (z[static_cast<std::size_t>(i)] - zm) / zs;
        if (!(t1 > 0.0)) {
            throw DomainError("synthetic sample produced a non-positive T1; pick another seed");
        }
        out.push_back(CoherenceSample{"Q" + std::to_string(i + 1), t1, std::nullopt, std::nullopt});
    }
    return out;
}

}  // namespace purcell
