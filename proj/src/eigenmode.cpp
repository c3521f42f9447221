#include "purcell/eigenmode.hpp"

#include "purcell/errors.hpp"
#include "purcell/units.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace purcell {

std::string Subsystem::name() const {
    switch (kind) {
    case SubsystemKind::filter: return "filter";
    case SubsystemKind::resonator: return "resonator_" + std::to_string(index);
    case SubsystemKind::qubit: return "qubit_" + std::to_string(index);
    case SubsystemKind::other: return "other";
    }
    return "other";
}

Subsystem Subsystem::parse(std::string_view text) {
    auto with_index = [&](std::string_view prefix, SubsystemKind kind) -> std::optional<Subsystem> {
        if (text == prefix) return Subsystem{kind, 0};
        if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
            (text[prefix.size()] == '_' || text[prefix.size()] == ':')) {
            int idx = 0;
            auto rest = text.substr(prefix.size() + 1);
            auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), idx);
            if (ec == std::errc{} && ptr == rest.data() + rest.size() && idx >= 0) {
                return Subsystem{kind, idx};
            }
        }
        return std::nullopt;
    };
    if (text == "filter") return Subsystem{SubsystemKind::filter, 0};
    if (text == "other") return Subsystem{SubsystemKind::other, 0};
    if (auto s = with_index("resonator", SubsystemKind::resonator)) return *s;
    if (auto s = with_index("qubit", SubsystemKind::qubit)) return *s;
    throw ParseError("unknown subsystem '" + std::string(text) + "'", 0);
}

double Mode::frequency_hz() const { return to_hz(omega_d); }

double Mode::participation_in(const BranchMap& map, Subsystem subsystem) const {
    double total = 0.0;
    for (const auto& [label, share] : participation) {
        auto it = map.find(label);
        if (it != map.end() && it->second == subsystem) total += share;
    }
    return total;
}

Band Band::hz(double f_min, double f_max) {
    if (!(f_min >= 0.0) || !(f_max > f_min)) {
        throw DomainError("band limits must be ordered and non-negative");
    }
    return Band{to_angular(f_min), to_angular(f_max)};
}

namespace {

// First-order state model of a lumped network in energy-normalized
// coordinates: x' = A x with A = K + S, K skew, S symmetric <= 0.
struct StateModel {
    Eigen::MatrixXd a;
    Eigen::MatrixXd loss;  // symmetric part of a
    // Maps a normalized state back to physical node voltages and inductor currents.
    Eigen::MatrixXd to_voltages;  // nodes x states
    Eigen::MatrixXd to_currents;  // inductors x states
    std::vector<const Element*> inductors;
    std::vector<int> node_of;     // netlist node index -> active node index or -1
    Netlist terminated;
};

StateModel build_state_model(const Netlist& net) {
    net.validate();
    for (const auto& e : net.elements()) {
        if (e.kind == ElementKind::transmission_line) {
            throw ValidationError("eigenmode analysis supports lumped elements only; '" + e.label +
                                      "' is a transmission line",
                                  {e.label});
        }
    }

    StateModel model;
    model.terminated = net.with_ports_terminated();
    const Netlist& t = model.terminated;

    // Only nodes touched by an element take part.
    const auto n_all = static_cast<int>(t.nodes().size());
    std::vector<bool> used(static_cast<std::size_t>(n_all), false);
    for (const auto& e : t.elements()) {
        if (auto a = t.node_index(e.node_a)) used[*a] = true;
        if (auto b = t.node_index(e.node_b)) used[*b] = true;
    }
    model.node_of.assign(static_cast<std::size_t>(n_all), -1);
    int n = 0;
    for (int i = 0; i < n_all; ++i) {
        if (used[i]) model.node_of[i] = n++;
    }
    auto idx = [&](const std::string& node) {
        auto i = t.node_index(node);
        return i ? model.node_of[*i] : -1;
    };

    for (const auto& e : t.elements()) {
        if (e.kind == ElementKind::inductor) model.inductors.push_back(&e);
    }
    const auto m = static_cast<int>(model.inductors.size());

    Eigen::MatrixXd cap = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(n, m);
    Eigen::VectorXd ind(m);
    auto stamp = [](Eigen::MatrixXd& mat, int a, int b, double v) {
        if (a >= 0) mat(a, a) += v;
        if (b >= 0) mat(b, b) += v;
        if (a >= 0 && b >= 0) {
            mat(a, b) -= v;
            mat(b, a) -= v;
        }
    };
    int k = 0;
    for (const auto& e : t.elements()) {
        const int a = idx(e.node_a);
        const int b = idx(e.node_b);
        switch (e.kind) {
        case ElementKind::capacitor: stamp(cap, a, b, e.value); break;
        case ElementKind::resistor: stamp(cond, a, b, 1.0 / e.value); break;
        case ElementKind::inductor:
            if (a >= 0) incidence(a, k) = 1.0;
            if (b >= 0) incidence(b, k) = -1.0;
            ind(k) = e.value;
            ++k;
            break;
        case ElementKind::transmission_line: break;
        }
    }

    // Split node space into the range of C (dynamic) and its null space
    // (algebraic nodes, eliminated through their conductances).
    Eigen::MatrixXd ur(n, 0), un(n, 0);
    Eigen::VectorXd lam_r(0);
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ces(cap);
        const Eigen::VectorXd lam = ces.eigenvalues();
        const double cutoff = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
        std::vector<int> range, null;
        for (int i = 0; i < n; ++i) {
            (lam(i) > cutoff && lam(i) > 0.0 ? range : null).push_back(i);
        }
        ur.resize(n, static_cast<Eigen::Index>(range.size()));
        un.resize(n, static_cast<Eigen::Index>(null.size()));
        lam_r.resize(static_cast<Eigen::Index>(range.size()));
        for (std::size_t i = 0; i < range.size(); ++i) {
            ur.col(static_cast<Eigen::Index>(i)) = ces.eigenvectors().col(range[i]);
            lam_r(static_cast<Eigen::Index>(i)) = lam(range[i]);
        }
        for (std::size_t i = 0; i < null.size(); ++i) {
            un.col(static_cast<Eigen::Index>(i)) = ces.eigenvectors().col(null[i]);
        }
    }
    const auto r = ur.cols();
    const auto z = un.cols();

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(z, z);
    if (z > 0) {
        const Eigen::MatrixXd gnn = un.transpose() * cond * un;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gnn);
        lu.setThreshold(1e-12);
        if (lu.rank() < z) {
            throw ValidationError(
                "eigenmode analysis: a node has neither a capacitive nor a resistive "
                "connection (inductor cutset)");
        }
        h = lu.inverse();
    }
    const Eigen::MatrixXd grr = ur.transpose() * cond * ur;
    const Eigen::MatrixXd grn = ur.transpose() * cond * un;
    const Eigen::MatrixXd p = un.transpose() * incidence;
    const Eigen::MatrixXd gs = grr - grn * h * grn.transpose();
    const Eigen::MatrixXd b = ur.transpose() * incidence - grn * h * p;
    const Eigen::MatrixXd rl = p.transpose() * h * p;

    const auto dim = r + m;
    Eigen::MatrixXd a(dim, dim);
    a.topLeftCorner(r, r) = -gs;
    a.topRightCorner(r, m) = -b;
    a.bottomLeftCorner(m, r) = b.transpose();
    a.bottomRightCorner(m, m) = -rl;

    Eigen::VectorXd inv_sqrt(dim);
    for (Eigen::Index i = 0; i < r; ++i) inv_sqrt(i) = 1.0 / std::sqrt(lam_r(i));
    for (Eigen::Index i = 0; i < m; ++i) inv_sqrt(r + i) = 1.0 / std::sqrt(ind(i));

    model.a = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
    model.loss = 0.5 * (model.a + model.a.transpose());

    // Physical states: y = inv_sqrt * x (first r), i = inv_sqrt * x (last m);
    // v = Ur y + Un zeta, zeta = -H (Gnr y + P i).
    Eigen::MatrixXd phys_y = Eigen::MatrixXd::Zero(r, dim);
    Eigen::MatrixXd phys_i = Eigen::MatrixXd::Zero(m, dim);
    for (Eigen::Index i = 0; i < r; ++i) phys_y(i, i) = inv_sqrt(i);
    for (Eigen::Index i = 0; i < m; ++i) phys_i(i, r + i) = inv_sqrt(r + i);
    const Eigen::MatrixXd zeta = -h * (grn.transpose() * phys_y + p * phys_i);
    model.to_voltages = ur * phys_y + un * zeta;
    model.to_currents = phys_i;
    return model;
}

}  // namespace

std::vector<Complex> state_spectrum(const Netlist& net) {
    const auto model = build_state_model(net);
    std::vector<Complex> out;
    if (model.a.rows() == 0) return out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(model.a, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

std::vector<Mode> eigenmodes(const Netlist& net, std::optional<Band> band) {
    const auto model = build_state_model(net);
    std::vector<Mode> modes;
    if (model.a.rows() == 0) return modes;

    Eigen::EigenSolver<Eigen::MatrixXd> es(model.a, true);
    if (es.info() != Eigen::Success) {
        throw Error("eigenvalue solver failed to converge");
    }
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd vectors = es.eigenvectors();
    const Netlist& t = model.terminated;

    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (!(lambda(i).imag() > 0.0)) continue;  // keep one of each conjugate pair
        const Eigen::VectorXcd x = vectors.col(i);
        const double norm2 = x.squaredNorm();

        Mode mode;
        mode.eigenvalue = lambda(i);
        mode.omega_d = lambda(i).imag();
        // Energy balance sigma = -x^H S x / x^H x: non-negative by construction
        // and accurate for weakly damped modes.
        const Complex rq = x.dot(model.loss.cast<Complex>() * x);
        mode.sigma = std::max(0.0, -rq.real() / norm2);
        if (mode.sigma > 0.0) {
            mode.q = mode.omega_d / (2.0 * mode.sigma);
        } else {
            mode.q = std::numeric_limits<double>::infinity();
            mode.q_infinite = true;
        }
        if (band && !band->contains(mode.omega_d)) continue;

        const Eigen::VectorXcd v = model.to_voltages.cast<Complex>() * x;
        const Eigen::VectorXcd cur = model.to_currents.cast<Complex>() * x;
        auto node_v = [&](const std::string& node) -> Complex {
            auto k = t.node_index(node);
            if (!k) return {};
            const int a = model.node_of[*k];
            return a >= 0 ? v(a) : Complex{};
        };
        double total = 0.0;
        int l = 0;
        for (const auto& e : t.elements()) {
            double energy = 0.0;
            if (e.kind == ElementKind::capacitor) {
                energy = 0.25 * e.value * std::norm(node_v(e.node_a) - node_v(e.node_b));
            } else if (e.kind == ElementKind::inductor) {
                energy = 0.25 * e.value * std::norm(cur(l++));
            } else {
                continue;
            }
            mode.participation[e.label] = energy;
            total += energy;
        }
        if (total > 0.0) {
            for (auto& [label, share] : mode.participation) share /= total;
        }
        modes.push_back(std::move(mode));
    }

    for (std::size_t i = 0; i < modes.size(); ++i) {
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            const double scale = std::abs(modes[i].eigenvalue);
            if (std::abs(modes[i].eigenvalue - modes[j].eigenvalue) <= 1e-9 * scale) {
                modes[i].degenerate = modes[j].degenerate = true;
            }
        }
    }
    std::sort(modes.begin(), modes.end(),
              [](const Mode& a, const Mode& b) { return a.omega_d < b.omega_d; });
    return modes;
}

std::vector<Mode> identify_modes(std::vector<Mode> modes, const BranchMap& map) {
    // Lower-Q subsystems first: used to break exact ties.
    auto rank = [](SubsystemKind k) {
        switch (k) {
        case SubsystemKind::filter: return 0;
        case SubsystemKind::resonator: return 1;
        case SubsystemKind::qubit: return 2;
        case SubsystemKind::other: return 3;
        }
        return 3;
    };
    for (auto& mode : modes) {
        std::map<Subsystem, double> shares;
        for (const auto& [label, share] : mode.participation) {
            auto it = map.find(label);
            if (it != map.end() && it->second.kind != SubsystemKind::other) {
                shares[it->second] += share;
            }
        }
        std::vector<std::pair<Subsystem, double>> ranked(shares.begin(), shares.end());
        std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return rank(a.first.kind) < rank(b.first.kind);
        });

        mode.identity = Subsystem{};
        mode.hybridized = false;
        mode.tie = false;
        if (ranked.empty() || ranked.front().second < kLabelThreshold) continue;
        const bool shared = ranked.size() > 1 && ranked[1].second >= kLabelThreshold;
        if (ranked.size() > 1 && std::abs(ranked[0].second - ranked[1].second) <= 1e-9) {
            // Exact tie: lower-Q kind wins, flagged.
            mode.tie = true;
            mode.hybridized = shared;
            mode.identity = ranked.front().first;
            continue;
        }
        if (shared) {
            mode.hybridized = true;
            continue;
        }
        mode.identity = ranked.front().first;
    }
    return modes;
}

std::vector<double> SweepTrace::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

SweepTrace sweep_element(const Netlist& net, std::string_view label,
                         const std::vector<double>& values, Subsystem track,
                         const BranchMap& map, std::optional<Band> band) {
    const Element* element = net.find_element(label);
    if (element == nullptr || element->kind != ElementKind::inductor) {
        throw ValidationError("sweep target '" + std::string(label) + "' is not an inductor",
                              {std::string(label)});
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            throw DomainError("sweep values must be positive");
        }
        if (i >= 2 && (values[i] - values[i - 1]) * (values[1] - values[0]) <= 0.0) {
            throw DomainError("sweep values must be strictly monotonic");
        }
        if (i == 1 && values[1] == values[0]) {
            throw DomainError("sweep values must be strictly monotonic");
        }
    }

    // Minimum tracked share for a mode to count as present at all.
    constexpr double kPresence = 0.1;
    // Candidates must hold at least this fraction of the best tracked share.
    constexpr double kVeto = 0.5;

    SweepTrace trace;
    trace.label = std::string(label);
    trace.tracked = track;
    std::optional<Complex> previous;
    for (double value : values) {
        SweepPoint point;
        point.value = value;
        auto modes = identify_modes(eigenmodes(net.with_value(label, value), band), map);

        double best_share = 0.0;
        for (const auto& m : modes) best_share = std::max(best_share, m.participation_in(map, track));
        if (modes.empty() || best_share < kPresence) {
            trace.points.push_back(std::move(point));
            previous.reset();
            continue;
        }

        const Mode* chosen = nullptr;
        if (!previous) {
            for (const auto& m : modes) {
                if (chosen == nullptr ||
                    m.participation_in(map, track) > chosen->participation_in(map, track)) {
                    chosen = &m;
                }
            }
        } else {
            const Mode* nearest = nullptr;
            for (const auto& m : modes) {
                const double d = std::abs(m.eigenvalue - *previous);
                if (nearest == nullptr || d < std::abs(nearest->eigenvalue - *previous)) {
                    nearest = &m;
                }
                if (m.participation_in(map, track) < kVeto * best_share) continue;
                if (chosen == nullptr || d < std::abs(chosen->eigenvalue - *previous)) chosen = &m;
            }
            point.jump = chosen != nearest;
        }
        previous = chosen->eigenvalue;
        point.mode = *chosen;
        trace.points.push_back(std::move(point));
    }
    return trace;
}

}  // namespace purcell
