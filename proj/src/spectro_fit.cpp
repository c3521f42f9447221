#include "purcell/spectro_fit.hpp"

#include "purcell/errors.hpp"
#include "purcell/purcell_model.hpp"
#include "purcell/units.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace purcell {

namespace {

constexpr int kParams = 7;
enum Param { kU = 0, kLnQi, kLnQe, kPhi, kAmp, kAlpha, kTauNs };
constexpr double kNs = 1e-9;
const Complex kI{0.0, 1.0};

double wrap_phase(double a) { return std::remainder(a, kTwoPi); }

}  // namespace

void ReflectionTrace::validate() const {
    if (frequencies.size() != s11.size()) {
        throw ValidationError("trace '" + source + "': frequency and S11 lengths differ");
    }
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (!(frequencies[i] > 0.0) || !std::isfinite(frequencies[i]) ||
            !std::isfinite(s11[i].real()) || !std::isfinite(s11[i].imag())) {
            throw ValidationError("trace '" + source + "': non-finite or non-positive sample " +
                                  std::to_string(i));
        }
        if (i > 0 && !(frequencies[i] > frequencies[i - 1])) {
            throw ValidationError("trace '" + source + "': frequencies not strictly increasing");
        }
    }
}

Complex reflection_model(const ResonatorFit& fit, double f) {
    const double qt = fit.q_tot();
    const auto& env = fit.environment;
    const Complex line = env.amplitude * std::exp(kI * (env.phase - kTwoPi * f * env.delay));
    const Complex dip = (2.0 * qt / fit.q_ext) * std::exp(kI * env.asymmetry) /
                        (1.0 + 2.0 * kI * qt * (f / fit.f0 - 1.0));
    return line * (1.0 - dip);
}

ReflectionTrace synthesize_trace(const ResonatorFit& fit, const std::vector<double>& frequencies_hz,
                                 double noise_level, std::uint64_t seed) {
    if (!(fit.f0 > 0.0) || !(fit.q_int > 0.0) || !(fit.q_ext > 0.0) || noise_level < 0.0) {
        throw DomainError("synthesize_trace needs positive f0, Q_int, Q_ext and noise >= 0");
    }
    ReflectionTrace trace;
    trace.source = fit.source.empty() ? "synthetic" : fit.source;
    trace.frequencies = frequencies_hz;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_level / std::sqrt(2.0));
    for (double f : frequencies_hz) {
        Complex s = reflection_model(fit, f);
        if (noise_level > 0.0) {
            const double re = normal(rng);
            const double im = normal(rng);
            s += Complex{re, im};
        }
        trace.s11.push_back(s);
    }
    trace.validate();
    return trace;
}

ModelJacobian model_jacobian(const std::vector<double>& p, double f_ref, double f_mid,
                             const std::vector<double>& freqs) {
    if (p.size() != kParams) {
        throw DomainError("model_jacobian expects 7 parameters");
    }
    const double f0 = f_ref * (1.0 + p[kU]);
    const double qi = std::exp(p[kLnQi]);
    const double qe = std::exp(p[kLnQe]);
    const double qt = 1.0 / (1.0 / qi + 1.0 / qe);
    const double dqt_da = qt * qt / qi;
    const double dqt_db = qt * qt / qe;
    const double k = 2.0 * qt / qe;
    const double dk_da = 2.0 * dqt_da / qe;
    const double dk_db = 2.0 * dqt_db / qe - k;
    const Complex e_phi = std::exp(kI * p[kPhi]);

    ModelJacobian out;
    out.parameters = p;
    out.f_ref = f_ref;
    out.f_mid = f_mid;
    const std::size_t n = freqs.size();
    out.rows.assign(2 * n, std::vector<double>(kParams, 0.0));
    out.values.assign(2 * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double f = freqs[j];
        const double x = f / f0 - 1.0;
        const double dx_du = -f * f_ref / (f0 * f0);
        const Complex line = p[kAmp] * std::exp(kI * (p[kAlpha] - kTwoPi * (f - f_mid) * p[kTauNs] * kNs));
        const Complex d = 1.0 + 2.0 * kI * qt * x;
        const Complex r = 1.0 - k * e_phi / d;
        const Complex s = line * r;

        const Complex dr_dk = -e_phi / d;
        const Complex dr_dd = k * e_phi / (d * d);
        Complex g[kParams];
        g[kU] = line * dr_dd * 2.0 * kI * qt * dx_du;
        g[kLnQi] = line * (dr_dk * dk_da + dr_dd * 2.0 * kI * x * dqt_da);
        g[kLnQe] = line * (dr_dk * dk_db + dr_dd * 2.0 * kI * x * dqt_db);
        g[kPhi] = line * (-k * kI * e_phi / d);
        g[kAmp] = s / p[kAmp];
        g[kAlpha] = kI * s;
        g[kTauNs] = -kI * kTwoPi * (f - f_mid) * kNs * s;

        out.values[j] = s.real();
        out.values[n + j] = s.imag();
        for (int c = 0; c < kParams; ++c) {
            out.rows[j][static_cast<std::size_t>(c)] = g[c].real();
            out.rows[n + j][static_cast<std::size_t>(c)] = g[c].imag();
        }
    }
    return out;
}

namespace {

struct Evaluation {
    Eigen::MatrixXd jacobian;
    Eigen::VectorXd residual;
    double cost = 0.0;
};

Evaluation evaluate(const Eigen::VectorXd& p, double f_ref, double f_mid,
                    const ReflectionTrace& trace) {
    const std::vector<double> pv(p.data(), p.data() + p.size());
    const auto mj = model_jacobian(pv, f_ref, f_mid, trace.frequencies);
    const std::size_t n = trace.size();
    Evaluation e;
    e.jacobian.resize(static_cast<Eigen::Index>(2 * n), kParams);
    e.residual.resize(static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < 2 * n; ++i) {
        for (int c = 0; c < kParams; ++c) {
            e.jacobian(static_cast<Eigen::Index>(i), c) = mj.rows[i][static_cast<std::size_t>(c)];
        }
        const double data = i < n ? trace.s11[i].real() : trace.s11[i - n].imag();
        e.residual(static_cast<Eigen::Index>(i)) = mj.values[i] - data;
    }
    e.cost = 0.5 * e.residual.squaredNorm();
    if (!std::isfinite(e.cost)) e.cost = std::numeric_limits<double>::infinity();
    return e;
}

// Least-squares slope of the unwrapped phase over samples [begin, end).
double phase_slope(const ReflectionTrace& t, std::size_t begin, std::size_t end) {
    std::vector<double> ph;
    double prev = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double a = std::arg(t.s11[i]);
        if (!ph.empty()) a = prev + wrap_phase(a - prev);
        ph.push_back(a);
        prev = a;
    }
    const auto n = static_cast<double>(ph.size());
    double fm = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < ph.size(); ++i) {
        fm += t.frequencies[begin + i];
        pm += ph[i];
    }
    fm /= n;
    pm /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ph.size(); ++i) {
        const double df = t.frequencies[begin + i] - fm;
        num += df * (ph[i] - pm);
        den += df * df;
    }
    return den > 0.0 ? num / den : 0.0;
}

struct Guess {
    Eigen::VectorXd p;
    double f_ref = 0.0;
    double f_mid = 0.0;
};

Guess initial_guess(const ReflectionTrace& t) {
    const std::size_t n = t.size();
    const std::size_t edge = std::max<std::size_t>(3, n / 10);

    Guess g;
    g.f_mid = 0.5 * (t.frequencies.front() + t.frequencies.back());
    const double tau = -0.5 * (phase_slope(t, 0, edge) + phase_slope(t, n - edge, n)) / kTwoPi;

    std::vector<Complex> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = t.s11[i] * std::exp(kI * kTwoPi * (t.frequencies[i] - g.f_mid) * tau);
    }
    Complex baseline{};
    for (std::size_t i = 0; i < edge; ++i) baseline += z[i] + z[n - 1 - i];
    baseline /= static_cast<double>(2 * edge);
    if (std::abs(baseline) == 0.0) {
        throw NoResonanceError("trace '" + t.source + "' has zero baseline");
    }

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::abs(z[i] / baseline - 1.0);

    // Noise scale from successive differences, robust to the dip itself.
    std::vector<double> steps;
    for (std::size_t i = 1; i < n; ++i) steps.push_back(std::abs(z[i] - z[i - 1]));
    const double noise = median(steps) / std::abs(baseline);

    const auto peak = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    const double dmax = d[peak];
    if (!(dmax > std::max(5.0 * noise, 1e-9))) {
        throw NoResonanceError("trace '" + t.source + "': no resonance stands out of the noise");
    }

    // Half-maximum width of d^2.
    const double half = dmax / std::sqrt(2.0);
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && d[lo - 1] >= half) --lo;
    while (hi + 1 < n && d[hi + 1] >= half) ++hi;
    auto cross = [&](std::size_t inside, std::size_t outside) {
        const double t0 = (half - d[inside]) / (d[outside] - d[inside]);
        return t.frequencies[inside] + t0 * (t.frequencies[outside] - t.frequencies[inside]);
    };
    const double f_lo = lo > 0 ? cross(lo, lo - 1) : t.frequencies.front();
    const double f_hi = hi + 1 < n ? cross(hi, hi + 1) : t.frequencies.back();
    const double f0 = t.frequencies[peak];
    const double width = std::max(f_hi - f_lo, t.frequencies[1] - t.frequencies[0]);
    const double qt = f0 / width;
    const double k = std::min(dmax, 1.9);
    const double qe = 2.0 * qt / k;
    const double qi = 1.0 / (1.0 / qt - 1.0 / qe);
    const double phi = std::arg(-(z[peak] / baseline - 1.0));

    g.f_ref = f0;
    g.p.resize(kParams);
    g.p << 0.0, std::log(qi), std::log(qe), phi, std::abs(baseline), std::arg(baseline),
        tau / kNs;
    return g;
}

}  // namespace

ResonatorFit fit_reflection(const ReflectionTrace& trace) {
    trace.validate();
    if (trace.size() < kMinFitPoints) {
        throw DomainError("trace '" + trace.source + "' has fewer than " +
                          std::to_string(kMinFitPoints) + " points");
    }
    const auto guess = initial_guess(trace);
    Eigen::VectorXd p = guess.p;
    auto e = evaluate(p, guess.f_ref, guess.f_mid, trace);

    // Marquardt-scaled damped Gauss-Newton. Stops when the cost no longer
    // drops measurably or no damping yields a decrease.
    double lambda = 1e-3;
    int it = 0;
    constexpr int kMaxIterations = 500;
    for (; it < kMaxIterations; ++it) {
        const Eigen::MatrixXd jtj = e.jacobian.transpose() * e.jacobian;
        const Eigen::VectorXd grad = e.jacobian.transpose() * e.residual;
        const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);

        bool improved = false;
        double drop = 0.0;
        for (; lambda < 1e16; lambda *= 10.0) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd trial = p + a.ldlt().solve(-grad);
            auto et = evaluate(trial, guess.f_ref, guess.f_mid, trace);
            if (et.cost < e.cost) {
                drop = (e.cost - et.cost) / e.cost;
                p = trial;
                e = std::move(et);
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                break;
            }
        }
        if (!improved || drop < 1e-13) break;
    }

    // Accept the end point only if it is stationary: the Gauss-Newton
    // decrement must be negligible against the residual.
    const Eigen::MatrixXd jtj = e.jacobian.transpose() * e.jacobian;
    const Eigen::VectorXd grad = e.jacobian.transpose() * e.residual;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
    const double decrement = std::sqrt(std::max(0.0, grad.dot(ldlt.solve(grad))));
    const bool converged =
        it < kMaxIterations && decrement <= 1e-3 * std::sqrt(2.0 * e.cost) + 1e-12;

    ResonatorFit fit;
    fit.source = trace.source;
    fit.f0 = guess.f_ref * (1.0 + p[kU]);
    fit.q_int = std::exp(p[kLnQi]);
    fit.q_ext = std::exp(p[kLnQe]);
    double amp = p[kAmp];
    double alpha_mid = p[kAlpha];
    if (amp < 0.0) {
        amp = -amp;
        alpha_mid += M_PI;
    }
    const double tau = p[kTauNs] * kNs;
    fit.environment.amplitude = amp;
    fit.environment.delay = tau;
    fit.environment.phase = wrap_phase(alpha_mid + kTwoPi * guess.f_mid * tau);
    fit.environment.asymmetry = wrap_phase(p[kPhi]);
    fit.residual_norm = std::sqrt(2.0 * e.cost);
    fit.iterations = it;
    fit.converged = converged;

    // Covariance s^2 (J^T J)^-1 at the optimum.
    const auto m = static_cast<double>(e.residual.size());
    const double dof = std::max(1.0, m - kParams);
    const double s2 = 2.0 * e.cost / dof;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
        const Eigen::MatrixXd cov = s2 * lu.inverse();
        auto sd = [&](int i) { return std::sqrt(std::max(0.0, cov(i, i))); };
        fit.sigma.f0 = guess.f_ref * sd(kU);
        fit.sigma.q_int = fit.q_int * sd(kLnQi);
        fit.sigma.q_ext = fit.q_ext * sd(kLnQe);
        const double qt = fit.q_tot();
        Eigen::VectorXd grad_qt = Eigen::VectorXd::Zero(kParams);
        grad_qt[kLnQi] = qt * qt / fit.q_int;
        grad_qt[kLnQe] = qt * qt / fit.q_ext;
        fit.sigma.q_tot = std::sqrt(std::max(0.0, grad_qt.dot(cov * grad_qt)));
        fit.sigma.amplitude = sd(kAmp);
        fit.sigma.asymmetry = sd(kPhi);
        fit.sigma.delay = sd(kTauNs) * kNs;
        Eigen::VectorXd grad_alpha = Eigen::VectorXd::Zero(kParams);
        grad_alpha[kAlpha] = 1.0;
        grad_alpha[kTauNs] = kTwoPi * guess.f_mid * kNs;
        fit.sigma.phase = std::sqrt(std::max(0.0, grad_alpha.dot(cov * grad_alpha)));
    } else {
        fit.converged = false;
    }
    return fit;
}

FitSummary aggregate_fits(const std::vector<ResonatorFit>& fits) {
    FitSummary s;
    std::vector<double> qi, qe, qt;
    for (const auto& f : fits) {
        if (!f.converged) {
            ++s.excluded;
            continue;
        }
        qi.push_back(f.q_int);
        qe.push_back(f.q_ext);
        qt.push_back(f.q_tot());
        s.table.push_back(FitTableRow{f.f0, f.q_int, f.q_ext, f.q_tot()});
    }
    if (qi.empty()) {
        throw DomainError("no converged fit to aggregate");
    }
    s.count = static_cast<int>(qi.size());
    s.median_q_int = median(qi);
    s.median_q_ext = median(qe);
    s.median_q_tot = median(qt);
    s.composed_q_tot = 1.0 / (1.0 / s.median_q_int + 1.0 / s.median_q_ext);
    s.sd_q_int = sample_sd(qi);
    s.sd_q_ext = sample_sd(qe);
    s.sd_q_tot = sample_sd(qt);
    std::sort(s.table.begin(), s.table.end(),
              [](const FitTableRow& a, const FitTableRow& b) { return a.f0 < b.f0; });
    return s;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw DomainError("rank correlation needs two equal-length series of at least 2");
    }
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

OverlayTable overlay_with_simulation(const std::vector<ResonatorFit>& fits, const QCurve& curve,
                                     double offset_hz) {
    if (curve.size() == 0) {
        throw DomainError("empty simulation curve");
    }
    OverlayTable table;
    table.offset = offset_hz;
    std::vector<double> measured, simulated;
    for (const auto& f : fits) {
        const double fs = f.f0 - offset_hz;
        const double w = to_angular(fs);
        if (w < curve.omegas.front() || w > curve.omegas.back()) {
            ++table.outside;
            continue;
        }
        const double v = curve.value_at(w);
        if (!std::isfinite(v)) {
            ++table.outside;
            continue;
        }
        table.rows.push_back(OverlayRow{f.f0, f.q_ext, fs, v});
        measured.push_back(f.q_ext);
        simulated.push_back(v);
    }
    if (table.rows.empty()) {
        throw DomainError("measured and simulated frequency bands do not overlap");
    }
    table.rank_correlation = measured.size() >= 2 ? spearman(measured, simulated) : 0.0;
    return table;
}

double estimate_offset(const std::vector<ResonatorFit>& fits, const QCurve& curve) {
    if (fits.empty()) {
        throw DomainError("no fits to locate the measured minimum");
    }
    const auto best = std::min_element(
        fits.begin(), fits.end(),
        [](const ResonatorFit& a, const ResonatorFit& b) { return a.q_ext < b.q_ext; });
    const auto idx = curve.argmin();
    if (!idx) {
        throw NoPassbandError("simulation curve has no defined minimum");
    }
    return best->f0 - to_hz(curve.omegas[*idx]);
}

}  // namespace purcell
