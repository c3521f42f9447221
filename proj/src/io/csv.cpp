#include "purcell/io/csv.hpp"

#include "purcell/errors.hpp"
#include "purcell/units.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace purcell::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double number(const std::string& cell, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + cell + "'", line);
    }
}

const char* flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("CSV is missing column '" + std::string(name) + "'", 1);
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw ParseError("expected " + std::to_string(t.header.size()) + " cells, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        t.rows.push_back(std::move(cells));
    }
    if (first) {
        throw ParseError("CSV has no header row", 0);
    }
    return t;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_q_curve(std::ostream& out, const QCurve& curve) {
    out << "freq_hz," << (curve.minimum_normalized ? "value_norm" : "q_per_c_ohm_rad_per_s")
        << ",normalized\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << fmt(to_hz(curve.omegas[i])) << ',' << fmt(curve.values[i]) << ','
            << flag(curve.minimum_normalized) << '\n';
    }
}

QCurve read_q_curve(std::string_view text) {
    const auto t = parse_csv(text);
    const auto fcol = t.column("freq_hz");
    std::size_t vcol = 0;
    bool normalized = false;
    try {
        vcol = t.column("value_norm");
        normalized = true;
    } catch (const ParseError&) {
        vcol = t.column("q_per_c_ohm_rad_per_s");
    }
    QCurve c;
    c.minimum_normalized = normalized;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        c.omegas.push_back(to_angular(number(row[fcol], line)));
        c.values.push_back(number(row[vcol], line));
    }
    FrequencyGrid check(c.omegas);  // enforces ordering
    return c;
}

void write_sweep_trace(std::ostream& out, const SweepTrace& trace, const BranchMap& map) {
    out << "inductance_h,freq_hz,q,sigma_per_s,identity,participation,jump,gap\n";
    for (const auto& p : trace.points) {
        out << fmt(p.value) << ',';
        if (p.mode) {
            out << fmt(p.mode->frequency_hz()) << ',' << fmt(p.mode->q) << ','
                << fmt(p.mode->sigma) << ',' << p.mode->identity.name() << ','
                << fmt(p.mode->participation_in(map, trace.tracked)) << ',' << flag(p.jump)
                << ",0\n";
        } else {
            out << "nan,nan,nan,,nan,0,1\n";
        }
    }
}

void write_fits(std::ostream& out, const std::vector<ResonatorFit>& fits) {
    out << "source,f0_hz,q_int,q_ext,q_tot,amplitude,phase_rad,delay_s,asymmetry_rad,"
           "sigma_f0_hz,sigma_q_int,sigma_q_ext,sigma_q_tot,residual_norm,converged\n";
    for (const auto& f : fits) {
        out << f.source << ',' << fmt(f.f0) << ',' << fmt(f.q_int) << ',' << fmt(f.q_ext) << ','
            << fmt(f.q_tot()) << ',' << fmt(f.environment.amplitude) << ','
            << fmt(f.environment.phase) << ',' << fmt(f.environment.delay) << ','
            << fmt(f.environment.asymmetry) << ',' << fmt(f.sigma.f0) << ','
            << fmt(f.sigma.q_int) << ',' << fmt(f.sigma.q_ext) << ',' << fmt(f.sigma.q_tot) << ','
            << fmt(f.residual_norm) << ',' << flag(f.converged) << '\n';
    }
}

std::vector<ResonatorFit> read_fits(std::string_view text) {
    const auto t = parse_csv(text);
    const auto src = t.column("source");
    const auto f0 = t.column("f0_hz");
    const auto qi = t.column("q_int");
    const auto qe = t.column("q_ext");
    std::optional<std::size_t> conv;
    try {
        conv = t.column("converged");
    } catch (const ParseError&) {
    }
    std::vector<ResonatorFit> out;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        ResonatorFit f;
        f.source = row[src];
        f.f0 = number(row[f0], line);
        f.q_int = number(row[qi], line);
        f.q_ext = number(row[qe], line);
        f.converged = !conv || row[*conv] != "0";
        out.push_back(f);
    }
    return out;
}

void write_overlay(std::ostream& out, const OverlayTable& table) {
    out << "f0_hz,q_ext,sim_freq_hz,sim_value,offset_hz\n";
    for (const auto& r : table.rows) {
        out << fmt(r.f0) << ',' << fmt(r.q_ext) << ',' << fmt(r.sim_frequency) << ','
            << fmt(r.sim_value) << ',' << fmt(table.offset) << '\n';
    }
}

std::vector<CoherenceSample> read_coherence(std::string_view text) {
    const auto t = parse_csv(text);
    const auto id = t.column("qubit_id");
    const auto t1 = t.column("t1_s");
    auto optional_column = [&](std::string_view name) -> std::optional<std::size_t> {
        try {
            return t.column(name);
        } catch (const ParseError&) {
            return std::nullopt;
        }
    };
    const auto ramsey = optional_column("t2_ramsey_s");
    const auto echo = optional_column("t2_echo_s");
    std::vector<CoherenceSample> out;
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        CoherenceSample s;
        s.qubit_id = row[id];
        s.t1 = number(row[t1], line);
        if (ramsey && !row[*ramsey].empty()) s.t2_ramsey = number(row[*ramsey], line);
        if (echo && !row[*echo].empty()) s.t2_echo = number(row[*echo], line);
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

void write_coherence(std::ostream& out, const std::vector<CoherenceSample>& samples) {
    out << "qubit_id,t1_s,t2_ramsey_s,t2_echo_s\n";
    for (const auto& s : samples) {
        out << s.qubit_id << ',' << fmt(s.t1) << ',' << (s.t2_ramsey ? fmt(*s.t2_ramsey) : "")
            << ',' << (s.t2_echo ? fmt(*s.t2_echo) : "") << '\n';
    }
}

ReflectionTrace read_trace_csv(std::string_view text, std::string source) {
    const auto t = parse_csv(text);
    const auto f = t.column("freq_hz");
    const auto re = t.column("re");
    const auto im = t.column("im");
    ReflectionTrace trace;
    trace.source = std::move(source);
    int line = 1;
    for (const auto& row : t.rows) {
        ++line;
        trace.frequencies.push_back(number(row[f], line));
        trace.s11.emplace_back(number(row[re], line), number(row[im], line));
    }
    trace.validate();
    return trace;
}

}  // namespace purcell::io
