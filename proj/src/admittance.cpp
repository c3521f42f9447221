#include "purcell/admittance.hpp"

#include "purcell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace purcell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Crossing of `threshold` between samples i and j, linear in omega.
double crossing(const QCurve& c, std::size_t i, std::size_t j, double threshold) {
    const double t = (threshold - c.values[i]) / (c.values[j] - c.values[i]);
    return c.omegas[i] + t * (c.omegas[j] - c.omegas[i]);
}

}  // namespace

double QCurve::value_at(double omega) const {
    if (omegas.empty() || omega < omegas.front() || omega > omegas.back()) {
        throw DomainError("frequency outside the curve span");
    }
    auto it = std::lower_bound(omegas.begin(), omegas.end(), omega);
    auto j = static_cast<std::size_t>(it - omegas.begin());
    if (omegas[j] == omega) {
        return values[j];
    }
    const std::size_t i = j - 1;
    const double t = (omega - omegas[i]) / (omegas[j] - omegas[i]);
    return values[i] + t * (values[j] - values[i]);
}

std::optional<std::size_t> QCurve::argmin() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) continue;
        if (!best || values[i] < values[*best]) best = i;
    }
    return best;
}

double q_from_admittance(double omega_r, double capacitance, Complex y) {
    if (!(omega_r > 0.0) || !(capacitance > 0.0)) {
        throw DomainError("q_from_admittance needs positive frequency and capacitance");
    }
    if (!(y.real() > 0.0)) {
        throw UndefinedQError("Q undefined: Re[Y] <= 0 (lossless or non-passive point)");
    }
    return omega_r * capacitance / y.real();
}

QCurve q_per_capacitance_curve(const Netlist& net, std::string_view port,
                               const FrequencyGrid& grid) {
    QCurve curve;
    curve.per_capacitance = true;
    curve.omegas = grid.points();
    curve.values.reserve(grid.size());
    for (const auto& r : port_admittance_sweep(net, port, grid)) {
        const bool defined = !r.pole && r.admittance.real() > 0.0;
        curve.values.push_back(defined ? r.omega / r.admittance.real() : kNaN);
    }
    return curve;
}

QCurve normalize_to_minimum(QCurve curve) {
    const auto idx = curve.argmin();
    if (!idx) {
        throw NoPassbandError("no lossy sample on the grid: nothing to normalize");
    }
    const double minimum = curve.values[*idx];
    for (auto& v : curve.values) {
        v /= minimum;
    }
    curve.values[*idx] = 1.0;
    curve.minimum_normalized = true;
    return curve;
}

QCurve normalized_q_curve(const Netlist& net, std::string_view port, const FrequencyGrid& grid) {
    return normalize_to_minimum(q_per_capacitance_curve(net, port, grid));
}

PassbandMetrics passband_metrics(const QCurve& curve) {
    const auto idx = curve.argmin();
    if (!idx) {
        throw NoPassbandError("curve has no defined samples");
    }
    const std::size_t k = *idx;
    const std::size_t n = curve.size();
    if (k == 0 || k + 1 >= n || std::isnan(curve.values[k - 1]) ||
        std::isnan(curve.values[k + 1])) {
        throw NoPassbandError("curve minimum lies on the grid edge: no interior passband");
    }

    PassbandMetrics m;

    // Vertex of the parabola through the three samples around the minimum.
    {
        const double x0 = curve.omegas[k - 1], x1 = curve.omegas[k], x2 = curve.omegas[k + 1];
        const double y0 = curve.values[k - 1], y1 = curve.values[k], y2 = curve.values[k + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double a = (d12 - d01) / (x2 - x0);
        // y = y0 + d01 (x - x0) + a (x - x0)(x - x1)
        m.center = a > 0.0 ? 0.5 * (x0 + x1) - d01 / (2.0 * a) : x1;
        m.center = std::clamp(m.center, x0, x2);
    }

    const double threshold = 2.0 * curve.values[k];
    m.lower_edge = kNaN;
    m.upper_edge = kNaN;
    std::size_t prev = k;
    for (std::size_t i = k; i-- > 0;) {
        if (std::isnan(curve.values[i])) continue;
        if (curve.values[i] >= threshold) {
            m.lower_edge = crossing(curve, prev, i, threshold);
            m.lower_found = true;
            break;
        }
        prev = i;
    }
    prev = k;
    for (std::size_t i = k + 1; i < n; ++i) {
        if (std::isnan(curve.values[i])) continue;
        if (curve.values[i] >= threshold) {
            m.upper_edge = crossing(curve, prev, i, threshold);
            m.upper_found = true;
            break;
        }
        prev = i;
    }
    if (m.complete()) {
        m.bandwidth = m.upper_edge - m.lower_edge;
        m.q_filter = m.center / m.bandwidth;
    } else {
        m.bandwidth = kNaN;
        m.q_filter = kNaN;
    }
    return m;
}

double filtering_ratio_db(const QCurve& curve, double omega_stop, double omega_pass) {
    const double stop = curve.value_at(omega_stop);
    const double pass = curve.value_at(omega_pass);
    if (!(stop > 0.0) || !(pass > 0.0)) {
        throw DomainError("filtering ratio needs defined positive curve values");
    }
    return 10.0 * (std::log10(stop) - std::log10(pass));
}

ModalResonance modal_resonance(const Netlist& net, std::string_view port, double inductance,
                               double omega_guess) {
    if (!(inductance > 0.0) || !(omega_guess > 0.0)) {
        throw DomainError("modal_resonance needs positive inductance and frequency guess");
    }
    auto susceptance = [&](double w) {
        const auto r = port_admittance(net, port, w);
        if (r.pole) {
            throw DomainError("probe port hits a pole: " + r.diagnostic);
        }
        return r.admittance.imag();
    };

    // omega = 1/sqrt(L B/omega): B/omega is the slowly varying shunt capacitance.
    double omega = omega_guess;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const double b = susceptance(omega);
        if (!(b > 0.0)) {
            throw DomainError("probe port is not capacitive near the guess: no shunt resonance");
        }
        const double next = 1.0 / std::sqrt(inductance * b / omega);
        const double damped = 0.5 * (omega + next);
        if (std::abs(damped - omega) <= 1e-13 * omega) {
            omega = damped;
            converged = true;
            break;
        }
        omega = damped;
    }
    if (!converged) {
        throw DomainError("modal resonance search did not converge");
    }

    const double h = 1e-5 * omega;
    const double slope = (susceptance(omega + h) - susceptance(omega - h)) / (2.0 * h);
    const auto r = port_admittance(net, port, omega);

    ModalResonance out;
    out.omega = omega;
    out.capacitance = 0.5 * (slope + r.admittance.imag() / omega);
    out.admittance = r.admittance;
    out.q = q_from_admittance(omega, out.capacitance, r.admittance);
    return out;
}

}  // namespace purcell
