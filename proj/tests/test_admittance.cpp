#include "purcell/admittance.hpp"
#include "purcell/errors.hpp"
#include "purcell/purcell_model.hpp"
#include "purcell/synthesis.hpp"
#include "purcell/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace purcell;

namespace {

QCurve lorentzian(double f0_hz, double q, const FrequencyGrid& grid) {
    QCurve c;
    c.minimum_normalized = true;
    const double w0 = to_angular(f0_hz);
    for (double w : grid.points()) {
        const double x = 2.0 * q * (w / w0 - 1.0);
        c.omegas.push_back(w);
        c.values.push_back(1.0 + x * x);
    }
    return c;
}

// Resonator (C, L) hanging off a 50 ohm line through Cc, with L replaced by
// a probe port.
Netlist coupled_resonator(double c, double cc) {
    Netlist net;
    net.add_node("r").add_node("t");
    net.add_capacitor("C", "r", "gnd", c);
    net.add_capacitor("Cc", "r", "t", cc);
    net.add_resistor("Z0", "t", "gnd", 50.0);
    net.add_port("PL", "r", "gnd");
    return net;
}

}  // namespace

TEST_CASE("q_from_admittance hand value and scaling") {
    const double w = to_angular(9.8e9);
    CHECK(q_from_admittance(w, 400e-15, {0.02, 0.0}) == doctest::Approx(1.2315).epsilon(1e-4));
    const double q1 = q_from_admittance(w, 400e-15, {0.02, 0.3});
    CHECK(q_from_admittance(w, 400e-15, {0.04, 0.3}) == doctest::Approx(q1 / 2.0).epsilon(1e-14));
    CHECK(q_from_admittance(w, 1200e-15, {0.02, 0.3}) == doctest::Approx(3.0 * q1).epsilon(1e-14));
    CHECK(q_from_admittance(w, 400e-15, {0.06, 0.3}) == doctest::Approx(q1 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)q_from_admittance(w, 400e-15, {0.0, 1.0}), UndefinedQError);
    CHECK_THROWS_AS((void)q_from_admittance(w, 400e-15, {-1e-6, 0.0}), UndefinedQError);
}

TEST_CASE("weakly coupled resonator matches the direct-coupling Q") {
    const double c = 400e-15, cc = 1.73e-15, l = 0.66e-9;
    const auto net = coupled_resonator(c, cc);
    const double guess = 1.0 / std::sqrt(l * (c + cc));
    const auto m = modal_resonance(net, "PL", l, guess);
    const double expected = direct_coupling_qext(c + cc, cc, 50.0, m.omega);
    CHECK(std::abs(m.q / expected - 1.0) < 0.02);
    CHECK(m.capacitance == doctest::Approx(c + cc).epsilon(1e-3));
    // Resonance condition: Im[Y] = 1/(omega L).
    CHECK(m.admittance.imag() == doctest::Approx(1.0 / (m.omega * l)).epsilon(1e-9));
}

TEST_CASE("normalized curve of a pure load") {
    Netlist net;
    net.add_node("a").add_resistor("R", "a", "gnd", 50.0).add_port("P", "a", "gnd");
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 101);
    const auto c = normalized_q_curve(net, "P", grid);
    CHECK(c.minimum_normalized);
    REQUIRE(c.argmin().has_value());
    CHECK(*c.argmin() == 0);
    CHECK(c.values.front() == 1.0);
    CHECK(c.values.back() == doctest::Approx(15.0 / 4.0).epsilon(1e-12));
    // The raw curve is omega/Re[Y] = 50 omega.
    const auto raw = q_per_capacitance_curve(net, "P", grid);
    CHECK(raw.values[10] == doctest::Approx(50.0 * grid[10]).epsilon(1e-12));
    CHECK_THROWS_AS((void)passband_metrics(c), NoPassbandError);
}

TEST_CASE("lossless network has nothing to normalize") {
    Netlist net;
    net.add_node("a").add_capacitor("C", "a", "gnd", 1e-12).add_port("P", "a", "gnd");
    CHECK_THROWS_AS((void)normalized_q_curve(net, "P", FrequencyGrid::linear_hz(4e9, 15e9, 11)),
                    NoPassbandError);
}

TEST_CASE("uniform loss scaling shifts only the scale") {
    // Port across R || C || (series L, C): Re[Y] = 1/R exactly.
    auto make = [](double r) {
        Netlist net;
        net.add_node("a").add_node("b");
        net.add_resistor("R", "a", "gnd", r);
        net.add_inductor("L", "a", "b", 2e-9);
        net.add_capacitor("C", "b", "gnd", 0.3e-12);
        net.add_capacitor("Cp", "a", "gnd", 0.1e-12);
        net.add_port("P", "a", "gnd");
        return net;
    };
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 401);
    const double k = 3.0;
    const auto base = q_per_capacitance_curve(make(200.0), "P", grid);
    const auto scaled = q_per_capacitance_curve(make(200.0 / k), "P", grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(scaled.values[i] == doctest::Approx(base.values[i] / k).epsilon(1e-9));
    }
    CHECK(normalize_to_minimum(base).argmin() == normalize_to_minimum(scaled).argmin());
}

TEST_CASE("passband of a Lorentzian") {
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 2001);
    const auto m = passband_metrics(lorentzian(9.8e9, 10.9, grid));
    REQUIRE(m.complete());
    CHECK(to_hz(m.center) == doctest::Approx(9.8e9).epsilon(1e-4));
    // Factor-2 crossings at f0 (1 +- 1/(2Q)): bandwidth f0/Q.
    CHECK(to_hz(m.bandwidth) == doctest::Approx(9.8e9 / 10.9).epsilon(0.01));
    CHECK(to_hz(m.bandwidth) == doctest::Approx(0.90e9).epsilon(0.01));
    CHECK(m.q_filter == doctest::Approx(10.9).epsilon(0.01));
}

TEST_CASE("passband center is stable under grid refinement") {
    const auto coarse = FrequencyGrid::linear_hz(4e9, 15e9, 201);
    const auto fine = FrequencyGrid::linear_hz(4e9, 15e9, 4001);
    const double f0 = 9.8123e9;
    const auto a = passband_metrics(lorentzian(f0, 10.9, coarse));
    const auto b = passband_metrics(lorentzian(f0, 10.9, fine));
    const double half_step = 0.5 * (coarse[1] - coarse[0]);
    CHECK(std::abs(a.center - b.center) <= half_step);
}

TEST_CASE("passband error paths") {
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 201);
    SUBCASE("flat curve") {
        QCurve c;
        for (double w : grid.points()) {
            c.omegas.push_back(w);
            c.values.push_back(1.0);
        }
        CHECK_THROWS_AS((void)passband_metrics(c), NoPassbandError);
    }
    SUBCASE("minimum on the edge") {
        CHECK_THROWS_AS((void)passband_metrics(lorentzian(3.9e9, 10.0, grid)), NoPassbandError);
    }
    SUBCASE("upper crossing outside the grid") {
        const auto m = passband_metrics(lorentzian(14.8e9, 10.0, grid));
        CHECK(m.lower_found);
        CHECK_FALSE(m.upper_found);
        CHECK_FALSE(m.complete());
        CHECK(std::isnan(m.bandwidth));
        CHECK(std::isnan(m.q_filter));
    }
}

TEST_CASE("filtering ratio") {
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 2001);
    const auto c = lorentzian(9.8e9, 10.9, grid);
    const double a = to_angular(4.4e9), b = to_angular(9.8e9);
    CHECK(filtering_ratio_db(c, a, a) == 0.0);
    CHECK(filtering_ratio_db(c, a, b) == -filtering_ratio_db(c, b, a));
    CHECK(filtering_ratio_db(c, a, b) > 20.0);
    CHECK_THROWS_AS((void)filtering_ratio_db(c, to_angular(3e9), b), DomainError);
    CHECK_THROWS_AS((void)filtering_ratio_db(c, a, to_angular(16e9)), DomainError);
}

TEST_CASE("calibrated filter: ratio against a single-pole oracle") {
    const auto cal = calibrate_filter(9.8e9, 0.9e9);
    const auto probe = build_filter_probe(cal.elements);
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 2001);
    const auto curve = normalized_q_curve(probe, names::input_port(0), grid);
    const auto m = passband_metrics(curve);
    REQUIRE(m.complete());

    const double ws = to_angular(4.4e9);
    const double ratio = filtering_ratio_db(curve, ws, m.center);
    // Weak probe into a parallel resonance: omega/Re[Y] ~ (G^2 + B^2)/(omega G).
    const double x = ws / m.center;
    const double detune = m.q_filter * (x - 1.0 / x);
    const double oracle = 10.0 * std::log10((1.0 + detune * detune) / x);
    MESSAGE("filtering ratio " << ratio << " dB, single-pole oracle " << oracle << " dB");
    CHECK(ratio >= 20.0);
    CHECK(std::abs(ratio - oracle) < 0.5);
}

TEST_CASE("curve interpolation and argmin") {
    QCurve c;
    c.omegas = {1.0, 2.0, 3.0};
    c.values = {4.0, NAN, 2.0};
    CHECK(c.argmin() == 2u);
    CHECK_THROWS_AS((void)c.value_at(0.5), DomainError);
    QCurve d;
    d.omegas = {1.0, 2.0};
    d.values = {1.0, 3.0};
    CHECK(d.value_at(1.25) == doctest::Approx(1.5));
}
