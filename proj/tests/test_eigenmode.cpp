#include "purcell/eigenmode.hpp"
#include "purcell/errors.hpp"
#include "purcell/filter_comparison.hpp"
#include "purcell/synthesis.hpp"
#include "purcell/units.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace purcell;

namespace {

Netlist rlc(double r, double l, double c) {
    Netlist net;
    net.add_node("a");
    net.add_resistor("R", "a", "gnd", r);
    net.add_inductor("L", "a", "gnd", l);
    net.add_capacitor("C", "a", "gnd", c);
    return net;
}

const FilterCalibration& calibration() {
    static const FilterCalibration cal = calibrate_filter(9.8e9, 0.9e9);
    return cal;
}

int count_kind(const std::vector<Mode>& modes, SubsystemKind kind) {
    return static_cast<int>(std::count_if(modes.begin(), modes.end(),
                                          [&](const Mode& m) { return m.identity.kind == kind; }));
}

}  // namespace

TEST_CASE("parallel RLC against the analytic oscillator") {
    const double r = 5e3, l = 1.8e-9, c = 146.52e-15;
    const auto modes = eigenmodes(rlc(r, l, c));
    REQUIRE(modes.size() == 1);
    const double sigma = 1.0 / (2.0 * r * c);
    const double wd = std::sqrt(1.0 / (l * c) - sigma * sigma);
    CHECK(modes[0].sigma == doctest::Approx(sigma).epsilon(1e-9));
    CHECK(modes[0].omega_d == doctest::Approx(wd).epsilon(1e-9));
    CHECK(modes[0].q == doctest::Approx(wd / (2.0 * sigma)).epsilon(1e-9));
    CHECK(modes[0].q == doctest::Approx(45.1).epsilon(1e-3));
    CHECK(modes[0].frequency_hz() == doctest::Approx(9.8e9).epsilon(2e-3));
}

TEST_CASE("lossless LC has an infinite Q") {
    const double l = 1.8e-9, c = 146.52e-15;
    Netlist net;
    net.add_node("a").add_inductor("L", "a", "gnd", l).add_capacitor("C", "a", "gnd", c);
    const auto modes = eigenmodes(net);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].q_infinite);
    CHECK(modes[0].sigma == 0.0);
    CHECK(modes[0].frequency_hz() == doctest::Approx(1.0 / (kTwoPi * std::sqrt(l * c))).epsilon(1e-12));
}

TEST_CASE("no storage elements means no modes") {
    Netlist net;
    net.add_node("a").add_resistor("R", "a", "gnd", 50.0);
    CHECK(eigenmodes(net).empty());
}

TEST_CASE("transmission lines are rejected") {
    Netlist net;
    net.add_node("a").add_node("b").add_line("T", "a", "b", 50.0, 1e-10);
    net.add_capacitor("C", "b", "gnd", 1e-12);
    CHECK_THROWS_AS((void)eigenmodes(net), ValidationError);
}

TEST_CASE("ports are replaced by their reference resistors") {
    const double l = 1.8e-9, c = 146.52e-15;
    auto net = rlc(5e3, l, c);
    net.add_port("P", "a", "gnd", 5e3);
    // Two 5 kohm in parallel.
    const double sigma = 1.0 / (2.0 * 2.5e3 * c);
    const double wd = std::sqrt(1.0 / (l * c) - sigma * sigma);
    CHECK(eigenmodes(net)[0].q == doctest::Approx(wd / (2.0 * sigma)).epsilon(1e-9));
}

TEST_CASE("random passive networks: stability, conjugate symmetry, participations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int trial = 0; trial < 40; ++trial) {
        Netlist net;
        const int nodes = 4;
        for (int k = 0; k < nodes; ++k) net.add_node("n" + std::to_string(k));
        net.add_capacitor("C0", "n0", "gnd", 0.5e-12);
        net.add_resistor("R0", "n0", "gnd", 200.0);
        int label = 0;
        for (int a = 0; a < nodes; ++a) {
            for (int b = a + 1; b <= nodes; ++b) {
                const std::string na = "n" + std::to_string(a);
                const std::string nb = b == nodes ? "gnd" : "n" + std::to_string(b);
                const std::string lab = "E" + std::to_string(label++);
                switch (kind(rng)) {
                case 0: net.add_resistor(lab, na, nb, 10.0 + 1e3 * u(rng)); break;
                case 1: net.add_inductor(lab, na, nb, 0.2e-9 + 5e-9 * u(rng)); break;
                default: net.add_capacitor(lab, na, nb, 0.05e-12 + 2e-12 * u(rng)); break;
                }
            }
        }
        std::vector<Complex> spectrum;
        try {
            spectrum = state_spectrum(net);
        } catch (const ValidationError&) {
            continue;  // inductor cutset or capacitor loop drawn at random
        }
        // Inductor loops and capacitor cutsets give zero eigenvalues that the
        // solver returns as round-off of order eps times the spectral radius.
        double radius = 0.0;
        for (const auto& s : spectrum) radius = std::max(radius, std::abs(s));
        for (const auto& s : spectrum) {
            CHECK(s.real() <= 1e-9 * std::max(std::abs(s), radius));
            if (std::abs(s.imag()) > 1e-6 * std::abs(s)) {
                const auto twin = std::find_if(spectrum.begin(), spectrum.end(), [&](Complex t) {
                    return std::abs(t - std::conj(s)) <= 1e-9 * std::abs(s);
                });
                CHECK(twin != spectrum.end());
            }
        }
        for (const auto& m : eigenmodes(net)) {
            double total = 0.0;
            for (const auto& [label_, share] : m.participation) {
                CHECK(share >= 0.0);
                CHECK(share <= 1.0 + 1e-12);
                total += share;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(m.sigma >= 0.0);
        }
    }
}

TEST_CASE("degenerate tanks are flagged") {
    Netlist net;
    net.add_node("a").add_node("b");
    net.add_inductor("La", "a", "gnd", 2e-9).add_capacitor("Ca", "a", "gnd", 1e-12);
    net.add_inductor("Lb", "b", "gnd", 2e-9).add_capacitor("Cb", "b", "gnd", 1e-12);
    const auto modes = eigenmodes(net);
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].degenerate);
    CHECK(modes[1].degenerate);

    const auto split = eigenmodes(net.with_value("Lb", 2.2e-9));
    CHECK_FALSE(split[0].degenerate);
    CHECK_FALSE(split[1].degenerate);
}

TEST_CASE("band window") {
    Netlist net;
    net.add_node("a").add_node("b");
    net.add_inductor("La", "a", "gnd", 2e-9).add_capacitor("Ca", "a", "gnd", 1e-12);  // 3.56 GHz
    net.add_inductor("Lb", "b", "gnd", 1e-9).add_capacitor("Cb", "b", "gnd", 0.2e-12);  // 11.25 GHz
    CHECK(eigenmodes(net).size() == 2);
    const auto in = eigenmodes(net, Band::hz(4e9, 15e9));
    REQUIRE(in.size() == 1);
    CHECK(in[0].frequency_hz() == doctest::Approx(11.254e9).epsilon(1e-3));
}

TEST_CASE("single RLC is labelled by its branch") {
    const BranchMap map{{"L", {SubsystemKind::resonator, 0}}, {"C", {SubsystemKind::resonator, 0}}};
    const auto modes = identify_modes(eigenmodes(rlc(5e3, 1.8e-9, 146.52e-15)), map);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].identity == Subsystem{SubsystemKind::resonator, 0});
    CHECK_FALSE(modes[0].hybridized);
}

TEST_CASE("labelling rules") {
    Mode m;
    m.participation = {{"a", 0.5}, {"b", 0.5}};
    SUBCASE("exact tie goes to the lower-Q kind") {
        const BranchMap map{{"a", {SubsystemKind::qubit, 0}}, {"b", {SubsystemKind::filter, 0}}};
        const auto out = identify_modes({m}, map);
        CHECK(out[0].tie);
        CHECK(out[0].identity.kind == SubsystemKind::filter);
    }
    SUBCASE("two large unequal shares are hybridized") {
        m.participation = {{"a", 0.55}, {"b", 0.45}};
        const BranchMap map{{"a", {SubsystemKind::qubit, 0}}, {"b", {SubsystemKind::resonator, 0}}};
        const auto out = identify_modes({m}, map);
        CHECK(out[0].identity.kind == SubsystemKind::other);
        CHECK(out[0].hybridized);
        CHECK_FALSE(out[0].tie);
    }
    SUBCASE("small top share is other") {
        m.participation = {{"a", 0.35}, {"b", 0.33}, {"c", 0.32}};
        const BranchMap map{{"a", {SubsystemKind::qubit, 0}},
                            {"b", {SubsystemKind::resonator, 0}},
                            {"c", {SubsystemKind::filter, 0}}};
        const auto out = identify_modes({m}, map);
        CHECK(out[0].identity.kind == SubsystemKind::other);
        CHECK_FALSE(out[0].hybridized);
    }
}

TEST_CASE("subsystem names round-trip") {
    for (const auto& s : {Subsystem{SubsystemKind::filter, 0}, Subsystem{SubsystemKind::resonator, 3},
                          Subsystem{SubsystemKind::qubit, 8}, Subsystem{SubsystemKind::other, 0}}) {
        CHECK(Subsystem::parse(s.name()) == s);
    }
    CHECK(Subsystem::parse("resonator") == Subsystem{SubsystemKind::resonator, 0});
    CHECK_THROWS_AS((void)Subsystem::parse("cavity"), ParseError);
}

TEST_CASE("calibrated 1-1 cell: three modes, filter lowest Q") {
    const auto spec = default_unit_cell(calibration());
    const auto net = build_unit_cell(spec);
    const auto map = branch_map(spec);
    const auto modes = identify_modes(eigenmodes(net, Band::hz(4e9, 15e9)), map);
    REQUIRE(modes.size() == 3);
    CHECK(count_kind(modes, SubsystemKind::filter) == 1);
    CHECK(count_kind(modes, SubsystemKind::resonator) == 1);
    CHECK(count_kind(modes, SubsystemKind::qubit) == 1);
    const auto lowest = std::min_element(modes.begin(), modes.end(),
                                         [](const Mode& a, const Mode& b) { return a.q < b.q; });
    CHECK(lowest->identity.kind == SubsystemKind::filter);

    for (const auto& m : modes) {
        if (m.identity.kind == SubsystemKind::qubit) {
            CHECK(m.frequency_hz() == doctest::Approx(4.43e9).epsilon(0.01));
            CHECK(m.participation_in(map, m.identity) > 0.9);
        }
        if (m.identity.kind == SubsystemKind::resonator) {
            CHECK(m.participation_in(map, m.identity) > 0.9);
        }
    }
}

TEST_CASE("calibrated 9-1 cell: nine resonators and a filter in band") {
    UnitCellOptions opt;
    opt.n_resonators = 9;
    opt.with_qubits = false;
    const auto spec = default_unit_cell(calibration(), opt);
    const auto modes = identify_modes(eigenmodes(build_unit_cell(spec), Band::hz(4e9, 15e9)),
                                      branch_map(spec));
    CHECK(modes.size() == 10);
    CHECK(count_kind(modes, SubsystemKind::filter) == 1);
    std::vector<int> seen;
    for (const auto& m : modes) {
        if (m.identity.kind == SubsystemKind::resonator) seen.push_back(m.identity.index);
    }
    std::sort(seen.begin(), seen.end());
    std::vector<int> all(9);
    std::iota(all.begin(), all.end(), 0);
    CHECK(seen == all);
}

TEST_CASE("resonator swept onto the qubit hybridizes both modes") {
    const auto spec = default_unit_cell(calibration());
    const auto map = branch_map(spec);
    const auto net = build_unit_cell(spec);
    // Resonator inductance that puts its bare LC on the bare qubit frequency.
    const auto lr = resonator_inductances_for(spec, {kDefaultQubitFrequency});
    const auto modes = identify_modes(eigenmodes(net.with_value(names::resonator_inductor(0), lr[0]),
                                                 Band::hz(3e9, 6e9)),
                                      map);
    REQUIRE(modes.size() == 2);
    for (const auto& m : modes) {
        CHECK(m.identity.kind == SubsystemKind::other);
        CHECK(m.hybridized);
    }
}

TEST_CASE("sweep_element tracks the resonator across the passband") {
    const auto spec = default_unit_cell(calibration());
    const auto map = branch_map(spec);
    const auto net = build_unit_cell(spec);
    std::vector<double> freqs;
    for (int k = 0; k < 45; ++k) freqs.push_back(6e9 + k * 0.2e9);
    const auto ls = resonator_inductances_for(spec, freqs);
    const auto trace = sweep_element(net, names::resonator_inductor(0), ls,
                                     Subsystem{SubsystemKind::resonator, 0}, map, Band::hz(4e9, 15e9));
    REQUIRE(trace.points.size() == ls.size());
    CHECK(trace.values() == ls);

    // Q_res is smallest inside the passband and rises on both sides.
    std::size_t best = 0;
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        REQUIRE(trace.points[i].mode.has_value());
        if (trace.points[i].mode->q < trace.points[best].mode->q) best = i;
    }
    const double f_min = trace.points[best].mode->frequency_hz();
    CHECK(std::abs(f_min - 9.8e9) < 0.45e9);
    CHECK(trace.points.front().mode->q > 10.0 * trace.points[best].mode->q);
    CHECK(trace.points.back().mode->q > 10.0 * trace.points[best].mode->q);
}

TEST_CASE("sweep gaps when the tracked mode leaves the band") {
    const auto net = rlc(5e3, 1.8e-9, 146.52e-15);
    const BranchMap map{{"L", {SubsystemKind::resonator, 0}}, {"C", {SubsystemKind::resonator, 0}}};
    // 1.8 nH -> 9.8 GHz, 3 nH -> 7.6 GHz, 9 nH -> 4.4 GHz
    const auto trace = sweep_element(net, "L", {1.8e-9, 3e-9, 9e-9}, {SubsystemKind::resonator, 0},
                                     map, Band::hz(7e9, 12e9));
    REQUIRE(trace.points.size() == 3);
    CHECK(trace.points[0].mode.has_value());
    CHECK(trace.points[1].mode.has_value());
    CHECK_FALSE(trace.points[2].mode.has_value());
}

TEST_CASE("sweep preconditions") {
    const auto net = rlc(5e3, 1.8e-9, 146.52e-15);
    const BranchMap map{{"L", {SubsystemKind::resonator, 0}}, {"C", {SubsystemKind::resonator, 0}}};
    const Subsystem res{SubsystemKind::resonator, 0};
    CHECK_THROWS_AS((void)sweep_element(net, "C", {1e-12, 2e-12}, res, map), ValidationError);
    CHECK_THROWS_AS((void)sweep_element(net, "X", {1e-9, 2e-9}, res, map), ValidationError);
    CHECK_THROWS_AS((void)sweep_element(net, "L", {1e-9, 2e-9, 1.5e-9}, res, map), DomainError);
    CHECK_THROWS_AS((void)sweep_element(net, "L", {1e-9, -2e-9}, res, map), DomainError);
}

TEST_CASE("with/without filter comparison near the qubit band") {
    const auto spec = default_unit_cell(calibration());
    const auto cmp = compare_with_without_filter(spec, qubit_inductances_for(spec, {4.4e9}));
    REQUIRE(cmp.suppression_db.size() == 1);
    MESSAGE("suppression at 4.4 GHz: " << cmp.suppression_db[0] << " dB");
    CHECK(cmp.suppression_db[0] >= 20.0);
    CHECK(cmp.suppression_db[0] <= 40.0);
    CHECK(cmp.q_with[0] > cmp.q_without[0]);
}
