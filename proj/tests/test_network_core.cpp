#include "purcell/errors.hpp"
#include "purcell/mna.hpp"
#include "purcell/netlist.hpp"
#include "purcell/units.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

using namespace purcell;

namespace {

constexpr Complex j{0.0, 1.0};

Complex element_admittance(const Element& e, double w) {
    switch (e.kind) {
    case ElementKind::resistor: return 1.0 / e.value;
    case ElementKind::capacitor: return j * w * e.value;
    case ElementKind::inductor: return 1.0 / (j * w * e.value);
    default: break;
    }
    return {};
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

struct Ladder {
    Netlist net;
    std::vector<Element> stages;  // in order from the port
    std::vector<bool> series;
};

// Random ladder: the port sits on node n0; every stage is either a shunt
// element to ground on the current node or a series element to a new node.
// The last stage is always a shunt so that nothing is left dangling.
Ladder random_ladder(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(2, 8);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_between = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };

    Ladder l;
    const int n = count(rng);
    int node = 0;
    l.net.add_node("n0");
    for (int i = 0; i < n; ++i) {
        const bool series = i + 1 < n && u(rng) < 0.5;
        Element e;
        e.label = "E" + std::to_string(i);
        e.node_a = "n" + std::to_string(node);
        if (series) {
            ++node;
            e.node_b = "n" + std::to_string(node);
            l.net.add_node(e.node_b);
        } else {
            e.node_b = "gnd";
        }
        switch (kind(rng)) {
        case 0: e.kind = ElementKind::resistor; e.value = log_between(10.0, 1e3); break;
        case 1: e.kind = ElementKind::inductor; e.value = log_between(0.1e-9, 10e-9); break;
        default: e.kind = ElementKind::capacitor; e.value = log_between(0.1e-12, 10e-12); break;
        }
        l.net.add_element(e);
        l.stages.push_back(e);
        l.series.push_back(series);
    }
    l.net.add_port("P", "n0", "gnd", 50.0);
    return l;
}

// Series/parallel reduction from the far end of the ladder.
Complex reduce(const Ladder& l, double w) {
    Complex y{0.0, 0.0};
    for (std::size_t k = l.stages.size(); k-- > 0;) {
        const Complex ye = element_admittance(l.stages[k], w);
        if (l.series[k]) {
            y = (y == Complex{}) ? Complex{} : 1.0 / (1.0 / ye + 1.0 / y);
        } else {
            y += ye;
        }
    }
    return y;
}

Netlist parallel_rlc(double r, double l, double c) {
    Netlist net;
    net.add_node("a");
    net.add_resistor("R", "a", "gnd", r);
    net.add_inductor("L", "a", "gnd", l);
    net.add_capacitor("C", "a", "gnd", c);
    net.add_port("P", "a", "gnd");
    return net;
}

}  // namespace

TEST_CASE("single resistor stamps its conductance") {
    Netlist net;
    net.add_node("a").add_resistor("R", "a", "gnd", 50.0);
    const auto y = assemble_admittance(net, 1e9);
    REQUIRE(y.rows() == 1);
    CHECK(std::abs(y(0, 0) - Complex{0.02, 0.0}) < 1e-15);
}

TEST_CASE("capacitor entry is i omega C") {
    Netlist net;
    net.add_node("a").add_capacitor("Cc", "a", "gnd", 1.73e-15);
    const auto y = assemble_admittance(net, to_angular(9.8e9));
    CHECK(y(0, 0).real() == 0.0);
    CHECK(y(0, 0).imag() == doctest::Approx(1.0652e-4).epsilon(1e-4));
}

TEST_CASE("series L, shunt C ladder matrix matches hand algebra") {
    const double w = to_angular(3e9), l = 2e-9, c = 1e-12;
    Netlist net;
    net.add_node("a").add_node("b");
    net.add_inductor("L", "a", "b", l);
    net.add_capacitor("C", "b", "gnd", c);
    net.add_port("P", "a", "gnd");
    const auto y = assemble_admittance(net, w);
    const Complex yl = 1.0 / (j * w * l);
    CHECK(rel(y(0, 0), yl) < 1e-14);
    CHECK(rel(y(0, 1), -yl) < 1e-14);
    CHECK(rel(y(1, 0), -yl) < 1e-14);
    CHECK(rel(y(1, 1), yl + j * w * c) < 1e-14);

    const auto r = port_admittance(net, "P", w);
    CHECK_FALSE(r.pole);
    CHECK(rel(r.admittance, 1.0 / (j * w * l + 1.0 / (j * w * c))) < 1e-12);
}

TEST_CASE("port across a lone resistor") {
    Netlist net;
    net.add_node("a").add_resistor("R", "a", "gnd", 50.0).add_port("P", "a", "gnd");
    const auto r = port_admittance(net, "P", 1e10);
    CHECK(std::abs(r.admittance - Complex{0.02, 0.0}) < 1e-15);
}

TEST_CASE("parallel RLC at resonance shows only 1/R") {
    const double l = 1.8e-9, c = 146.52e-15;
    const auto net = parallel_rlc(5e3, l, c);
    const auto r = port_admittance(net, "P", 1.0 / std::sqrt(l * c));
    CHECK(r.admittance.real() == doctest::Approx(2e-4).epsilon(1e-12));
    CHECK(std::abs(r.admittance.imag()) < 1e-12);
}

TEST_CASE("random ladders agree with series/parallel reduction") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> f(0.5e9, 20e9);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto l = random_ladder(rng);
        const double w = to_angular(f(rng));
        const auto r = port_admittance(l.net, "P", w);
        REQUIRE_FALSE(r.pole);
        worst = std::max(worst, rel(r.admittance, reduce(l, w)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("five-element network against reduction") {
    // R1 across the port, then series L into C, R2 and C2 in parallel.
    const double w = to_angular(7.3e9);
    Netlist net;
    net.add_node("a").add_node("b");
    net.add_resistor("R1", "a", "gnd", 120.0);
    net.add_inductor("L", "a", "b", 1.1e-9);
    net.add_capacitor("C", "b", "gnd", 0.7e-12);
    net.add_resistor("R2", "b", "gnd", 33.0);
    net.add_capacitor("C2", "b", "gnd", 0.2e-12);
    net.add_port("P", "a", "gnd");
    const Complex yb = j * w * 0.7e-12 + 1.0 / 33.0 + j * w * 0.2e-12;
    const Complex expected = 1.0 / 120.0 + 1.0 / (j * w * 1.1e-9 + 1.0 / yb);
    CHECK(rel(port_admittance(net, "P", w).admittance, expected) < 1e-10);
}

TEST_CASE("passivity and reciprocity on random meshes") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int trial = 0; trial < 60; ++trial) {
        Netlist net;
        const int nodes = 4;
        for (int k = 0; k < nodes; ++k) net.add_node("n" + std::to_string(k));
        int label = 0;
        // A lossy shunt on every node keeps the matrix well posed.
        for (int k = 0; k < nodes; ++k) {
            net.add_resistor("G" + std::to_string(k), "n" + std::to_string(k), "gnd",
                             100.0 + 1e4 * u(rng));
        }
        for (int a = 0; a < nodes; ++a) {
            for (int b = a + 1; b <= nodes; ++b) {
                if (u(rng) < 0.4) continue;
                const std::string na = "n" + std::to_string(a);
                const std::string nb = b == nodes ? "gnd" : "n" + std::to_string(b);
                const std::string lab = "E" + std::to_string(label++);
                switch (kind(rng)) {
                case 0: net.add_resistor(lab, na, nb, 5.0 + 500.0 * u(rng)); break;
                case 1: net.add_inductor(lab, na, nb, 0.2e-9 + 5e-9 * u(rng)); break;
                default: net.add_capacitor(lab, na, nb, 0.05e-12 + 2e-12 * u(rng)); break;
                }
            }
        }
        net.add_port("P1", "n0", "gnd", 50.0);
        net.add_port("P2", "n2", "gnd", 25.0);
        net.add_port("P3", "n3", "n1", 75.0);

        const auto grid = FrequencyGrid::linear_hz(1e9, 15e9, 29);
        for (const auto& s : s_parameters(net, grid)) {
            REQUIRE_FALSE(s.pole);
            CHECK((s.s - s.s.transpose()).cwiseAbs().maxCoeff() < 1e-10);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.s);
            CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-9);
        }
        for (const auto& p : net.ports()) {
            for (const auto& r : port_admittance_sweep(net, p.label, grid)) {
                CHECK(r.admittance.real() >= -1e-12);
            }
        }
    }
}

TEST_CASE("S11 closed forms") {
    const auto grid = FrequencyGrid::linear_hz(1e9, 1e9, 1);

    SUBCASE("matched load") {
        Netlist net;
        net.add_node("a").add_resistor("R", "a", "gnd", 50.0).add_port("P", "a", "gnd");
        CHECK(std::abs(s_parameters(net, grid)[0].s(0, 0)) < 1e-15);
    }
    SUBCASE("open port") {
        Netlist net;
        net.add_node("a").add_port("P", "a", "gnd");
        CHECK(std::abs(s_parameters(net, grid)[0].s(0, 0) - 1.0) < 1e-15);
    }
    SUBCASE("shunt capacitor") {
        Netlist net;
        net.add_node("a").add_capacitor("C", "a", "gnd", 1e-12).add_port("P", "a", "gnd");
        const Complex y = j * to_angular(1e9) * 1e-12;
        const Complex expected = (1.0 - 50.0 * y) / (1.0 + 50.0 * y);
        CHECK(rel(s_parameters(net, grid)[0].s(0, 0), expected) < 1e-12);
    }
}

TEST_CASE("transmission line input admittance") {
    const double z0 = 50.0, delay = 37e-12;
    const double w = to_angular(4.2e9);

    SUBCASE("open-ended stub") {
        Netlist net;
        net.add_node("a").add_node("b").add_line("T", "a", "b", z0, delay).add_port("P", "a", "gnd");
        const auto r = port_admittance(net, "P", w);
        CHECK(rel(r.admittance, j * std::tan(w * delay) / z0) < 1e-12);
    }
    SUBCASE("matched termination") {
        Netlist net;
        net.add_node("a").add_node("b").add_line("T", "a", "b", z0, delay);
        net.add_resistor("R", "b", "gnd", z0).add_port("P", "a", "gnd");
        CHECK(rel(port_admittance(net, "P", w).admittance, Complex{1.0 / z0, 0.0}) < 1e-12);
    }
}

TEST_CASE("lossless resonance is reported as a pole") {
    const double l = 1.8e-9, c = 146.52e-15;
    const double w0 = 1.0 / std::sqrt(l * c);

    SUBCASE("tank across the port") {
        Netlist tank;
        tank.add_node("a").add_capacitor("C", "a", "gnd", c).add_inductor("L", "a", "gnd", l);
        tank.add_port("P", "a", "gnd");
        const auto r = port_admittance(tank, "P", w0);
        CHECK(r.pole);
        CHECK_FALSE(r.diagnostic.empty());
        CHECK_FALSE(port_admittance(tank, "P", 1.01 * w0).pole);
    }
    SUBCASE("isolated tank elsewhere in the network") {
        Netlist net;
        net.add_node("a").add_node("x");
        net.add_capacitor("C", "x", "gnd", c).add_inductor("L", "x", "gnd", l);
        net.add_resistor("R", "a", "gnd", 50.0).add_port("P", "a", "gnd");
        const auto p = port_admittance(net, "P", w0);
        CHECK(p.pole);
        CHECK_FALSE(p.diagnostic.empty());
    }
}

TEST_CASE("admittance varies continuously away from poles") {
    const auto net = parallel_rlc(500.0, 1.8e-9, 146.52e-15);
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 4001);
    const auto sweep = port_admittance_sweep(net, "P", grid);
    double largest_step = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        REQUIRE(std::isfinite(sweep[i].admittance.real()));
        REQUIRE(std::isfinite(sweep[i].admittance.imag()));
        if (i > 0) largest_step = std::max(largest_step, std::abs(sweep[i].admittance - sweep[i - 1].admittance));
    }
    CHECK(largest_step < 1e-3);
}

TEST_CASE("validation names offending elements") {
    SUBCASE("non-positive value and self loop") {
        Netlist net;
        net.add_node("a");
        net.add_resistor("Rneg", "a", "gnd", -1.0);
        net.add_capacitor("Cloop", "a", "a", 1e-12);
        try {
            net.validate();
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const auto& bad = e.offending();
            auto names = [&](const std::string& label) {
                return std::any_of(bad.begin(), bad.end(),
                                   [&](const std::string& b) { return b.rfind(label + ":", 0) == 0; });
            };
            CHECK(names("Rneg"));
            CHECK(names("Cloop"));
        }
    }
    SUBCASE("undeclared node") {
        Netlist net;
        net.add_node("a").add_element(Element{"R", ElementKind::resistor, "a", "b", 50.0, 0.0});
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("duplicate label") {
        Netlist net;
        net.add_node("a").add_resistor("R", "a", "gnd", 50.0).add_capacitor("R", "a", "gnd", 1e-12);
        CHECK_THROWS_AS(net.validate(), ValidationError);
    }
    SUBCASE("response without ports") {
        Netlist net;
        net.add_node("a").add_resistor("R", "a", "gnd", 50.0);
        CHECK_THROWS_AS((void)s_parameters(net, FrequencyGrid::linear_hz(1e9, 2e9, 2)), ValidationError);
    }
    SUBCASE("non-positive reference impedance") {
        Netlist net;
        net.add_node("a").add_resistor("R", "a", "gnd", 50.0).add_port("P", "a", "gnd", 0.0);
        CHECK_THROWS_AS(net.validate_with_ports(), ValidationError);
    }
}

TEST_CASE("non-positive frequency is a domain error") {
    const auto net = parallel_rlc(50.0, 1e-9, 1e-12);
    CHECK_THROWS_AS((void)assemble_admittance(net, 0.0), DomainError);
    CHECK_THROWS_AS((void)port_admittance(net, "P", -1.0), DomainError);
}

TEST_CASE("frequency grid invariants") {
    CHECK_THROWS_AS(FrequencyGrid({1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(FrequencyGrid({2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(FrequencyGrid({0.0, 1.0}), DomainError);
    const auto g = FrequencyGrid::linear_hz(4e9, 15e9, 2001);
    CHECK(g.size() == 2001);
    CHECK(g[0] == doctest::Approx(to_angular(4e9)));
    CHECK(g[2000] == doctest::Approx(to_angular(15e9)));
}

TEST_CASE("with_element_as_port and with_ports_terminated") {
    const auto net = parallel_rlc(5e3, 1.8e-9, 146.52e-15);
    const auto probed = net.with_element_as_port("L", "PL");
    CHECK(probed.find_element("L") == nullptr);
    REQUIRE(probed.find_port("PL") != nullptr);
    const auto terminated = net.with_ports_terminated();
    CHECK(terminated.ports().empty());
    CHECK(terminated.elements().size() == net.elements().size() + 1);
    CHECK(net.with_value("R", 10.0).find_element("R")->value == 10.0);
}
