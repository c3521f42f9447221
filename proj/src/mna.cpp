#include "purcell/mna.hpp"

#include "purcell/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace purcell {

namespace {

constexpr double kSingularRcond = 1e-13;

using Edge = std::pair<int, int>;  // node indices, -1 for ground

int index_or_ground(const Netlist& net, const std::string& node) {
    auto idx = net.node_index(node);
    return idx ? *idx : -1;
}

void stamp(Eigen::MatrixXcd& y, int a, int b, Complex value) {
    if (a >= 0) y(a, a) += value;
    if (b >= 0) y(b, b) += value;
    if (a >= 0 && b >= 0) {
        y(a, b) -= value;
        y(b, a) -= value;
    }
}

void check_omega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("angular frequency must be positive, got " + std::to_string(omega));
    }
}

std::vector<Edge> element_edges(const Netlist& net) {
    std::vector<Edge> edges;
    edges.reserve(net.elements().size());
    for (const auto& e : net.elements()) {
        edges.emplace_back(index_or_ground(net, e.node_a), index_or_ground(net, e.node_b));
        // A line also couples each end to the ground return.
        if (e.kind == ElementKind::transmission_line) {
            edges.emplace_back(index_or_ground(net, e.node_a), -1);
        }
    }
    return edges;
}

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

struct NodalSolution {
    Eigen::MatrixXcd voltages;  // all nodes x injections
    bool singular = false;
    std::string diagnostic;
};

// Solves Y v = I restricted to the connected components that carry an
// injection. A component with no path to ground gets its lowest node as
// datum. Rows are scaled before the conditioning check so that element
// value spreads do not masquerade as singularity.
NodalSolution solve_nodal(const Eigen::MatrixXcd& y, const std::vector<Edge>& edges,
                          const Eigen::MatrixXcd& injections) {
    const int n = static_cast<int>(y.rows());
    const int ground = n;
    DisjointSets sets(n + 1);
    for (auto [a, b] : edges) {
        sets.unite(a < 0 ? ground : a, b < 0 ? ground : b);
    }

    std::vector<bool> driven_root(static_cast<std::size_t>(n + 1), false);
    for (int i = 0; i < n; ++i) {
        if (injections.row(i).cwiseAbs().maxCoeff() > 0.0) {
            driven_root[sets.find(i)] = true;
        }
    }
    const int ground_root = sets.find(ground);
    std::vector<int> datum(static_cast<std::size_t>(n + 1), -1);
    std::vector<int> reduced(static_cast<std::size_t>(n), -1);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const int root = sets.find(i);
        if (!driven_root[root]) continue;
        if (root != ground_root && datum[root] < 0) {
            datum[root] = i;
            continue;
        }
        reduced[i] = m++;
    }

    NodalSolution out;
    out.voltages = Eigen::MatrixXcd::Zero(n, injections.cols());
    if (m == 0) {
        return out;
    }

    Eigen::MatrixXcd yr(m, m);
    Eigen::MatrixXcd ir(m, injections.cols());
    for (int i = 0; i < n; ++i) {
        if (reduced[i] < 0) continue;
        ir.row(reduced[i]) = injections.row(i);
        for (int j = 0; j < n; ++j) {
            if (reduced[j] < 0) continue;
            yr(reduced[i], reduced[j]) = y(i, j);
        }
    }

    Eigen::VectorXd scale(m);
    for (int i = 0; i < m; ++i) {
        const double row = yr.row(i).cwiseAbs().maxCoeff();
        if (row == 0.0) {
            out.singular = true;
            out.diagnostic = "node without any admittance path";
            return out;
        }
        scale(i) = 1.0 / std::sqrt(row);
    }
    const Eigen::MatrixXcd scaled = scale.asDiagonal() * yr * scale.asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(scaled);
    const double rcond = lu.rcond();
    if (!(rcond > kSingularRcond)) {
        out.singular = true;
        out.diagnostic = "nodal matrix singular (rcond " + std::to_string(rcond) +
                         "): lossless pole";
        return out;
    }
    const Eigen::MatrixXcd solved =
        scale.asDiagonal() * lu.solve(scale.asDiagonal() * ir);
    for (int i = 0; i < n; ++i) {
        if (reduced[i] >= 0) out.voltages.row(i) = solved.row(reduced[i]);
    }
    if (!solved.allFinite()) {
        out.singular = true;
        out.diagnostic = "non-finite nodal solution";
    }
    return out;
}

Complex port_voltage(const Eigen::MatrixXcd& v, int a, int b, Eigen::Index col) {
    Complex va = a >= 0 ? v(a, col) : Complex{};
    Complex vb = b >= 0 ? v(b, col) : Complex{};
    return va - vb;
}

}  // namespace

Eigen::MatrixXcd assemble_admittance(const Netlist& net, double omega) {
    net.validate();
    check_omega(omega);
    const auto n = static_cast<Eigen::Index>(net.nodes().size());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    const Complex j{0.0, 1.0};
    for (const auto& e : net.elements()) {
        const int a = index_or_ground(net, e.node_a);
        const int b = index_or_ground(net, e.node_b);
        switch (e.kind) {
        case ElementKind::resistor:
            stamp(y, a, b, 1.0 / e.value);
            break;
        case ElementKind::capacitor:
            stamp(y, a, b, j * omega * e.value);
            break;
        case ElementKind::inductor:
            stamp(y, a, b, 1.0 / (j * omega * e.value));
            break;
        case ElementKind::transmission_line: {
            const double theta = omega * e.delay;
            const double s = std::sin(theta);
            if (std::abs(s) < 1e-12) {
                throw DomainError("transmission line '" + e.label +
                                  "' is a multiple of a half wavelength at this frequency");
            }
            const Complex y11 = -j * std::cos(theta) / (s * e.value);
            const Complex y12 = j / (s * e.value);
            if (a >= 0) y(a, a) += y11;
            if (b >= 0) y(b, b) += y11;
            if (a >= 0 && b >= 0) {
                y(a, b) += y12;
                y(b, a) += y12;
            }
            break;
        }
        }
    }
    return y;
}

PortResponse port_admittance(const Netlist& net, std::string_view port_label, double omega) {
    net.validate_with_ports();
    check_omega(omega);
    const Port* probe = net.find_port(port_label);
    if (probe == nullptr) {
        throw ValidationError("no port labelled '" + std::string(port_label) + "'",
                              {std::string(port_label)});
    }

    PortResponse out;
    out.omega = omega;
    Eigen::MatrixXcd y;
    try {
        y = assemble_admittance(net, omega);
    } catch (const DomainError& e) {
        out.pole = true;
        out.diagnostic = e.what();
        return out;
    }

    auto edges = element_edges(net);
    for (const auto& p : net.ports()) {
        if (&p == probe) continue;
        const int a = index_or_ground(net, p.node_a);
        const int b = index_or_ground(net, p.node_b);
        stamp(y, a, b, 1.0 / p.reference_impedance);
        edges.emplace_back(a, b);
    }

    const int a = index_or_ground(net, probe->node_a);
    const int b = index_or_ground(net, probe->node_b);
    Eigen::MatrixXcd inj = Eigen::MatrixXcd::Zero(y.rows(), 1);
    if (a >= 0) inj(a, 0) += 1.0;
    if (b >= 0) inj(b, 0) -= 1.0;

    // Terminals in different components: no current can flow, Y = 0 exactly.
    {
        const int n = static_cast<int>(y.rows());
        DisjointSets sets(n + 1);
        for (auto [u, v] : edges) sets.unite(u < 0 ? n : u, v < 0 ? n : v);
        if (sets.find(a < 0 ? n : a) != sets.find(b < 0 ? n : b)) {
            return out;
        }
    }

    const auto sol = solve_nodal(y, edges, inj);
    if (sol.singular) {
        out.pole = true;
        out.diagnostic = sol.diagnostic;
        return out;
    }
    const Complex z = port_voltage(sol.voltages, a, b, 0);
    if (std::abs(z) == 0.0 || !std::isfinite(std::abs(z))) {
        out.pole = true;
        out.diagnostic = "port short-circuited at this frequency";
        return out;
    }
    out.admittance = 1.0 / z;
    return out;
}

std::vector<PortResponse> port_admittance_sweep(const Netlist& net, std::string_view port_label,
                                                const FrequencyGrid& grid) {
    std::vector<PortResponse> out;
    out.reserve(grid.size());
    for (double w : grid.points()) {
        out.push_back(port_admittance(net, port_label, w));
    }
    return out;
}

std::vector<SParameterSample> s_parameters(const Netlist& net, const FrequencyGrid& grid) {
    net.validate_with_ports();
    const auto& ports = net.ports();
    const auto np = static_cast<Eigen::Index>(ports.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<SParameterSample> out;
    out.reserve(grid.size());
    for (double omega : grid.points()) {
        SParameterSample sample;
        sample.omega = omega;
        sample.s = Eigen::MatrixXcd::Constant(np, np, Complex{nan, nan});

        Eigen::MatrixXcd y;
        try {
            y = assemble_admittance(net, omega);
        } catch (const DomainError& e) {
            sample.pole = true;
            sample.diagnostic = e.what();
            out.push_back(std::move(sample));
            continue;
        }
        auto edges = element_edges(net);
        Eigen::MatrixXcd inj = Eigen::MatrixXcd::Zero(y.rows(), np);
        std::vector<std::pair<int, int>> terminals;
        for (Eigen::Index k = 0; k < np; ++k) {
            const auto& p = ports[static_cast<std::size_t>(k)];
            const int a = index_or_ground(net, p.node_a);
            const int b = index_or_ground(net, p.node_b);
            terminals.emplace_back(a, b);
            stamp(y, a, b, 1.0 / p.reference_impedance);
            edges.emplace_back(a, b);
            // Norton source of a unit incident power wave.
            const double drive = 2.0 / std::sqrt(p.reference_impedance);
            if (a >= 0) inj(a, k) += drive;
            if (b >= 0) inj(b, k) -= drive;
        }
        const auto sol = solve_nodal(y, edges, inj);
        if (sol.singular) {
            sample.pole = true;
            sample.diagnostic = sol.diagnostic;
            out.push_back(std::move(sample));
            continue;
        }
        for (Eigen::Index col = 0; col < np; ++col) {
            for (Eigen::Index row = 0; row < np; ++row) {
                const auto [a, b] = terminals[static_cast<std::size_t>(row)];
                const double z0 = ports[static_cast<std::size_t>(row)].reference_impedance;
                sample.s(row, col) = port_voltage(sol.voltages, a, b, col) / std::sqrt(z0) -
                                     (row == col ? 1.0 : 0.0);
            }
        }
        out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace purcell
