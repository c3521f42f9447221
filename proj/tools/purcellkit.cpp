// purcellkit: command-line front end for the purcell library.

#include "purcell/admittance.hpp"
#include "purcell/eigenmode.hpp"
#include "purcell/errors.hpp"
#include "purcell/filter_comparison.hpp"
#include "purcell/io/config.hpp"
#include "purcell/io/csv.hpp"
#include "purcell/io/netlist_format.hpp"
#include "purcell/io/svg.hpp"
#include "purcell/io/touchstone.hpp"
#include "purcell/purcell_model.hpp"
#include "purcell/spectro_fit.hpp"
#include "purcell/synthesis.hpp"
#include "purcell/units.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace purcell;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

std::string line(const char* fmt, double v) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string ghz(double hz) { return line("%.4f GHz", hz / 1e9); }

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string netlist;
    std::string port;
    std::string grid = "4e9:15e9:2001";
    std::string out;
    std::string svg;
    bool raw = false;
};

int run_simulate(const SimulateArgs& a) {
    const auto doc = io::read_netlist_file(a.netlist);
    const auto grid = io::parse_grid(a.grid).grid();
    // An element label (typically a junction or resonator inductor) is
    // replaced by a probe port in its place.
    auto net = doc.netlist;
    std::string port = a.port;
    if (net.find_port(port) == nullptr && net.find_element(port) != nullptr) {
        port = "P_" + a.port;
        net = net.with_element_as_port(a.port, port);
    }
    auto curve = q_per_capacitance_curve(net, port, grid);
    if (!a.raw) curve = normalize_to_minimum(curve);

    std::ostringstream csv;
    io::write_q_curve(csv, curve);
    emit(a.out, csv.str());

    try {
        const auto m = passband_metrics(curve);
        std::cerr << "center " << ghz(to_hz(m.center));
        if (m.complete()) {
            std::cerr << ", bandwidth " << ghz(to_hz(m.bandwidth)) << ", Q_filter "
                      << line("%.3f", m.q_filter);
        } else {
            std::cerr << ", 3 dB edge outside the grid";
        }
        std::cerr << '\n';
    } catch (const NoPassbandError& e) {
        std::cerr << "no passband: " << e.what() << '\n';
    }

    if (!a.svg.empty()) {
        io::Series s{a.port, {}, curve.values};
        for (double w : curve.omegas) s.x.push_back(to_hz(w) / 1e9);
        io::ChartOptions o;
        o.title = a.raw ? "omega / Re[Y]" : "normalized omega / Re[Y]";
        o.x_label = "frequency (GHz)";
        o.y_label = a.raw ? "ohm rad/s" : "relative";
        o.log_y = true;
        emit(a.svg, io::line_chart({s}, o));
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct EigenArgs {
    std::string netlist;
    std::string sweep;
    std::string track = "resonator";
    std::string band;
    std::string out;
    std::string svg;
};

std::optional<Band> parse_band(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("band must read f1:f2", 0);
    return Band::hz(io::parse_value(text.substr(0, colon)), io::parse_value(text.substr(colon + 1)));
}

int run_eigen(const EigenArgs& a) {
    const auto doc = io::read_netlist_file(a.netlist);
    const auto band = parse_band(a.band);

    std::optional<io::SweepSpec> sweep;
    if (!a.sweep.empty()) {
        const auto eq = a.sweep.find('=');
        if (eq == std::string::npos) throw ParseError("--sweep must read label=v1:v2:n", 0);
        sweep = io::parse_range(a.sweep.substr(eq + 1));
        sweep->label = a.sweep.substr(0, eq);
    } else if (!doc.sweeps.empty()) {
        sweep = doc.sweeps.front();
    }

    std::ostringstream csv;
    if (!sweep) {
        const auto modes = identify_modes(eigenmodes(doc.netlist, band), doc.subsystems);
        csv << "freq_hz,q,sigma_per_s,identity,hybridized,degenerate\n";
        for (const auto& m : modes) {
            csv << io::fmt(m.frequency_hz()) << ',' << io::fmt(m.q) << ',' << io::fmt(m.sigma)
                << ',' << m.identity.name() << ',' << (m.hybridized ? 1 : 0) << ','
                << (m.degenerate ? 1 : 0) << '\n';
        }
        emit(a.out, csv.str());
        return 0;
    }

    const auto track = Subsystem::parse(a.track);
    const auto trace =
        sweep_element(doc.netlist, sweep->label, sweep->values(), track, doc.subsystems, band);
    io::write_sweep_trace(csv, trace, doc.subsystems);
    emit(a.out, csv.str());

    if (!a.svg.empty()) {
        io::Series s{track.name(), {}, {}};
        for (const auto& p : trace.points) {
            s.x.push_back(p.mode ? p.mode->frequency_hz() / 1e9 : NAN);
            s.y.push_back(p.mode ? p.mode->q : NAN);
        }
        io::ChartOptions o;
        o.title = "Q of the " + track.name() + " mode";
        o.x_label = "mode frequency (GHz)";
        o.y_label = "Q";
        o.log_y = true;
        emit(a.svg, io::line_chart({s}, o));
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    double f_center = 9.8e9;
    double bandwidth = 0.9e9;
    int n_res = 1;
    bool no_filter = false;
    bool no_qubits = false;
    bool patch = false;
    double eps = 2.2;
    double rho = 0.5;
    std::string out;
};

int run_synth(const SynthArgs& a) {
    std::ostringstream text;
    if (a.patch) {
        const auto p = make_patch(a.f_center, a.eps, a.rho);
        text << line("# patch side a = %.3f mm", p.side * 1e3)
             << line(" (%.6f mm exact)\n", p.side * 1e3);
    }
    const auto cal = calibrate_filter(a.f_center, a.bandwidth);
    UnitCellOptions opt;
    opt.n_resonators = a.n_res;
    opt.with_qubits = !a.no_qubits;
    const auto spec = default_unit_cell(cal, opt);

    text << line("# filter: L_f = %.6g H", cal.elements.inductance)
         << line(", C_f = %.6g F", cal.elements.capacitance)
         << line(", L_stub = %.6g H", cal.elements.stub_inductance)
         << line(", R_load = %.6g ohm\n", cal.elements.load_resistance);
    text << "# measured passband: center " << ghz(cal.achieved_center) << ", bandwidth "
         << ghz(cal.achieved_bandwidth) << line(", Q %.4f\n", cal.achieved_q);

    io::NetlistDocument doc;
    doc.netlist = a.no_filter ? build_no_filter_variant(spec) : build_unit_cell(spec);
    for (const auto& [label, sub] : branch_map(spec)) {
        if (doc.netlist.find_element(label) != nullptr) doc.subsystems[label] = sub;
    }
    text << io::serialize_netlist(doc);
    emit(a.out, text.str());
    return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::vector<std::string> files;
    std::string out;
};

int run_fit(const FitArgs& a) {
    std::vector<ResonatorFit> fits;
    int failures = 0;
    for (const auto& f : a.files) {
        try {
            const std::filesystem::path path(f);
            auto ext = path.extension().string();
            const auto trace = ext == ".csv"
                                   ? io::read_trace_csv(io::read_text_file(path), path.filename().string())
                                   : io::read_touchstone(path);
            fits.push_back(fit_reflection(trace));
        } catch (const Error& e) {
            std::cerr << f << ": " << e.what() << '\n';
            ++failures;
        }
    }
    std::ostringstream csv;
    io::write_fits(csv, fits);
    emit(a.out, csv.str());
    if (!fits.empty()) {
        try {
            const auto s = aggregate_fits(fits);
            std::cerr << "fits " << s.count << " (excluded " << s.excluded << ")"
                      << line(", median Q_int %.4g", s.median_q_int)
                      << line(", median Q_ext %.4g", s.median_q_ext)
                      << line(", Q_tot from medians %.4g", s.composed_q_tot)
                      << line(", median Q_tot %.4g\n", s.median_q_tot);
        } catch (const DomainError& e) {
            std::cerr << e.what() << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct TraceArgs {
    double f0 = 10.0e9;
    double q_int = 30e3;
    double q_ext = 8e3;
    double amplitude = 1.0;
    double phase = 0.0;
    double delay = 0.0;
    double asymmetry = 0.0;
    double span_linewidths = 10.0;
    int points = 401;
    double noise = 0.0;
    std::optional<std::uint64_t> seed;
    std::string format = "RI";
    std::string out;
};

int run_trace(const TraceArgs& a) {
    io::RunConfig cfg;
    cfg.seed = a.seed;
    ResonatorFit fit;
    fit.f0 = a.f0;
    fit.q_int = a.q_int;
    fit.q_ext = a.q_ext;
    fit.environment = FitEnvironment{a.amplitude, a.phase, a.delay, a.asymmetry};
    const double half = 0.5 * a.span_linewidths * a.f0 / fit.q_tot();
    std::vector<double> f;
    for (int i = 0; i < a.points; ++i) f.push_back(a.f0 - half + 2.0 * half * i / (a.points - 1));
    const auto trace = synthesize_trace(fit, f, a.noise, cfg.require_seed());
    const auto format = a.format == "MA"   ? io::TouchstoneFormat::ma
                        : a.format == "DB" ? io::TouchstoneFormat::db
                                           : io::TouchstoneFormat::ri;
    emit(a.out, io::write_touchstone(trace, format));
    return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string fits;
    std::string sim;
    double offset = 0.0;
    bool estimate = false;
    std::string out;
};

int run_compare(const CompareArgs& a) {
    const auto fits = io::read_fits(io::read_text_file(a.fits));
    const auto curve = io::read_q_curve(io::read_text_file(a.sim));
    const double offset = a.estimate ? estimate_offset(fits, curve) : a.offset;
    const auto table = overlay_with_simulation(fits, curve, offset);
    std::ostringstream csv;
    io::write_overlay(csv, table);
    emit(a.out, csv.str());
    std::cerr << "offset " << io::fmt(offset) << " Hz, rows " << table.rows.size()
              << ", outside " << table.outside << line(", rank correlation %.3f\n",
                                                       table.rank_correlation);
    return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    double f_center = 9.8e9;
    double bandwidth = 0.9e9;
    double f_qubit = 4.4e9;
    std::string coherence;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_report(const ReportArgs& a) {
    std::ostringstream r;
    const auto cal = calibrate_filter(a.f_center, a.bandwidth);
    r << "# Readout filter run summary\n\n";
    r << "## Filter calibration\n\n";
    r << line("- L_f: %.6g H\n", cal.elements.inductance);
    r << line("- C_f: %.6g F\n", cal.elements.capacitance);
    r << line("- stub inductance: %.6g H\n", cal.elements.stub_inductance);
    r << line("- loading conductance at center: %.6g S\n", cal.loading_conductance);

    const auto probe = build_filter_probe(cal.elements);
    const auto grid = FrequencyGrid::linear_hz(4e9, 15e9, 2001);
    const auto curve = normalized_q_curve(probe, names::input_port(0), grid);
    const auto m = passband_metrics(curve);
    r << "\n## Passband (4-15 GHz, 2001 points)\n\n";
    r << "- center: " << ghz(to_hz(m.center)) << '\n';
    r << "- 3 dB bandwidth: " << ghz(to_hz(m.bandwidth)) << '\n';
    r << line("- Q_filter: %.3f\n", m.q_filter);
    const double ratio = filtering_ratio_db(curve, to_angular(a.f_qubit), m.center);
    r << line("- filtering ratio (qubit band vs center): %.2f dB\n", ratio);

    const auto spec = default_unit_cell(cal);
    const auto ls = qubit_inductances_for(spec, {a.f_qubit});
    const auto cmp = compare_with_without_filter(spec, ls);
    const double w = to_angular(cmp.frequency_hz[0]);
    r << "\n## Qubit protection at " << ghz(a.f_qubit) << "\n\n";
    r << line("- Q with filter: %.4g\n", cmp.q_with[0]);
    r << line("- Q without filter: %.4g\n", cmp.q_without[0]);
    r << line("- suppression: %.2f dB\n", cmp.suppression_db[0]);
    r << line("- radiative T1 with filter: %.4g s\n", t1_radiative(cmp.q_with[0], w));
    const double limit = t1_radiative(cmp.q_without[0], w);
    r << line("- radiative T1 without filter: %.4g s\n", limit);

    std::vector<CoherenceSample> samples;
    if (!a.coherence.empty()) {
        samples = io::read_coherence(io::read_text_file(a.coherence));
    } else if (a.seed) {
        samples = synthetic_t1_sample(18, 84e-6, 19e-6, *a.seed);
    }
    if (!samples.empty()) {
        const auto v = validate_t1_against_limit(samples, limit);
        r << "\n## Measured T1 against the no-filter limit\n\n";
        r << "- samples above limit: " << v.above << " of " << samples.size() << '\n';
        r << line("- median T1: %.4g s\n", v.median_t1);
        r << line("- smallest margin: %.4g s\n", v.min_margin);
    }
    emit(a.out, r.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Purcell filter design and analysis toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Normalized Q/C curve seen at a port");
    c_sim->add_option("netlist", sim.netlist, "Netlist file")->required()->check(CLI::ExistingFile);
    c_sim->add_option("--port", sim.port, "Port label, or an element to replace by a port")->required();
    c_sim->add_option("--grid", sim.grid, "f1:f2:n in Hz")->capture_default_str();
    c_sim->add_option("--out", sim.out, "CSV output (default stdout)");
    c_sim->add_option("--svg", sim.svg, "Optional SVG chart");
    c_sim->add_flag("--raw", sim.raw, "Skip normalization to the minimum");

    EigenArgs eig;
    auto* c_eig = app.add_subcommand("eigen", "Eigenmodes, or a tracked sweep of one inductor");
    c_eig->add_option("netlist", eig.netlist, "Netlist file")->required()->check(CLI::ExistingFile);
    c_eig->add_option("--sweep", eig.sweep, "label=v1:v2:n");
    c_eig->add_option("--track", eig.track, "filter | resonator[_k] | qubit[_k]")->capture_default_str();
    c_eig->add_option("--band", eig.band, "f1:f2 in Hz");
    c_eig->add_option("--out", eig.out, "CSV output (default stdout)");
    c_eig->add_option("--svg", eig.svg, "Optional SVG chart of the sweep");

    SynthArgs syn;
    auto* c_syn = app.add_subcommand("synth", "Calibrate the filter and emit a unit-cell netlist");
    c_syn->add_option("--f-center", syn.f_center, "Passband center, Hz")->capture_default_str();
    c_syn->add_option("--bw", syn.bandwidth, "3 dB bandwidth, Hz")->capture_default_str();
    c_syn->add_option("--n-res", syn.n_res, "Resonators in the cell (1-9)")
        ->check(CLI::Range(1, kMaxResonatorsPerCell))
        ->capture_default_str();
    c_syn->add_flag("--no-filter", syn.no_filter, "Emit the variant without the filter");
    c_syn->add_flag("--no-qubits", syn.no_qubits, "Omit the qubit branches");
    c_syn->add_flag("--patch", syn.patch, "Also print the patch side length");
    c_syn->add_option("--eps", syn.eps, "Relative permittivity")->capture_default_str();
    c_syn->add_option("--rho", syn.rho, "Patch pre-factor")->capture_default_str();
    c_syn->add_option("--out", syn.out, "Netlist output (default stdout)");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit one-port reflection traces");
    c_fit->add_option("files", fit.files, "Touchstone .s1p or CSV (freq_hz,re,im) traces")
        ->required()
        ->check(CLI::ExistingFile);
    c_fit->add_option("--out", fit.out, "CSV output (default stdout)");

    TraceArgs tr;
    auto* c_tr = app.add_subcommand("trace", "Write a synthetic one-port reflection trace");
    c_tr->add_option("--f0", tr.f0, "Resonance, Hz")->capture_default_str();
    c_tr->add_option("--q-int", tr.q_int)->capture_default_str();
    c_tr->add_option("--q-ext", tr.q_ext)->capture_default_str();
    c_tr->add_option("--amplitude", tr.amplitude)->capture_default_str();
    c_tr->add_option("--phase", tr.phase, "rad")->capture_default_str();
    c_tr->add_option("--delay", tr.delay, "s")->capture_default_str();
    c_tr->add_option("--asymmetry", tr.asymmetry, "rad")->capture_default_str();
    c_tr->add_option("--span", tr.span_linewidths, "Span in linewidths")->capture_default_str();
    c_tr->add_option("--points", tr.points)->check(CLI::Range(20, 1000000))->capture_default_str();
    c_tr->add_option("--noise", tr.noise, "Complex noise std dev")->capture_default_str();
    c_tr->add_option("--seed", tr.seed, "RNG seed (required)");
    c_tr->add_option("--format", tr.format, "RI | MA | DB")
        ->check(CLI::IsMember({"RI", "MA", "DB"}))
        ->capture_default_str();
    c_tr->add_option("--out", tr.out, "Touchstone output (default stdout)");

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Overlay measured Q_ext on a simulated curve");
    c_cmp->add_option("--fits", cmp.fits, "Fit CSV")->required()->check(CLI::ExistingFile);
    c_cmp->add_option("--sim", cmp.sim, "Curve CSV from simulate")->required()->check(CLI::ExistingFile);
    c_cmp->add_option("--offset-hz", cmp.offset, "Measured minus simulated frequency")
        ->capture_default_str();
    c_cmp->add_flag("--estimate", cmp.estimate, "Estimate the offset from the minima");
    c_cmp->add_option("--out", cmp.out, "CSV output (default stdout)");

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Consolidated run summary (markdown)");
    c_rep->add_option("--f-center", rep.f_center)->capture_default_str();
    c_rep->add_option("--bw", rep.bandwidth)->capture_default_str();
    c_rep->add_option("--f-qubit", rep.f_qubit)->capture_default_str();
    c_rep->add_option("--coherence", rep.coherence, "CSV qubit_id,t1_s,t2_ramsey_s,t2_echo_s");
    c_rep->add_option("--seed", rep.seed, "Seed for a synthetic 18-qubit T1 sample");
    c_rep->add_option("--out", rep.out, "Output (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_eig->parsed()) return run_eigen(eig);
        if (c_syn->parsed()) return run_synth(syn);
        if (c_fit->parsed()) return run_fit(fit);
        if (c_tr->parsed()) return run_trace(tr);
        if (c_cmp->parsed()) return run_compare(cmp);
        if (c_rep->parsed()) return run_report(rep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
