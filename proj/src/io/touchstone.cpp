#include "purcell/io/touchstone.hpp"

#include "purcell/errors.hpp"
#include "purcell/io/netlist_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <sstream>

namespace purcell::io {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

double to_number(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'", line);
    }
}

}  // namespace

ReflectionTrace parse_touchstone(std::string_view text, std::string source) {
    double unit = 1e9;
    TouchstoneFormat format = TouchstoneFormat::ma;
    bool seen_option = false;

    ReflectionTrace trace;
    trace.source = std::move(source);
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto bang = raw.find('!');
        std::string line = bang == std::string::npos ? raw : raw.substr(0, bang);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        if (tok.front().front() == '#') {
            if (seen_option) continue;  // later option lines are ignored
            seen_option = true;
            if (tok.front().size() > 1) tok.front().erase(0, 1);
            else tok.erase(tok.begin());
            for (std::size_t i = 0; i < tok.size(); ++i) {
                const auto t = upper(tok[i]);
                if (t == "HZ") unit = 1.0;
                else if (t == "KHZ") unit = 1e3;
                else if (t == "MHZ") unit = 1e6;
                else if (t == "GHZ") unit = 1e9;
                else if (t == "S") continue;
                else if (t == "Y" || t == "Z" || t == "G" || t == "H") {
                    throw UnsupportedError("only S parameters are supported, got " + tok[i]);
                } else if (t == "RI") format = TouchstoneFormat::ri;
                else if (t == "MA") format = TouchstoneFormat::ma;
                else if (t == "DB") format = TouchstoneFormat::db;
                else if (t == "R") {
                    if (i + 1 >= tok.size()) throw ParseError("option R needs a value", line_no);
                    const double z0 = to_number(tok[++i], line_no);
                    if (!(z0 > 0.0)) throw ParseError("reference impedance must be positive", line_no);
                } else {
                    throw ParseError("unrecognised option '" + tok[i] + "'", line_no);
                }
            }
            continue;
        }

        if (tok.size() > 3) {
            throw UnsupportedError("line " + std::to_string(line_no) +
                                   ": more than one S parameter per line; only one-port files are supported");
        }
        if (tok.size() != 3) {
            throw ParseError("one-port data line needs frequency and two values", line_no);
        }
        const double f = to_number(tok[0], line_no) * unit;
        const double a = to_number(tok[1], line_no);
        const double b = to_number(tok[2], line_no);
        Complex s;
        switch (format) {
        case TouchstoneFormat::ri: s = Complex{a, b}; break;
        case TouchstoneFormat::ma: s = std::polar(a, b * std::numbers::pi / 180.0); break;
        case TouchstoneFormat::db:
            s = std::polar(std::pow(10.0, a / 20.0), b * std::numbers::pi / 180.0);
            break;
        }
        trace.frequencies.push_back(f);
        trace.s11.push_back(s);
    }
    if (trace.frequencies.empty()) {
        throw ParseError("Touchstone data is empty", 0);
    }
    trace.validate();
    return trace;
}

ReflectionTrace read_touchstone(const std::filesystem::path& path) {
    const auto ext = upper(path.extension().string());
    static const std::regex multiport(R"(\.S([0-9]+)P)");
    std::smatch m;
    if (std::regex_match(ext, m, multiport) && m[1] != "1") {
        throw UnsupportedError("'" + path.string() + "': only one-port (.s1p) files are supported");
    }
    try {
        return parse_touchstone(read_text_file(path), path.filename().string());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

std::string write_touchstone(const ReflectionTrace& trace, TouchstoneFormat format, double z0) {
    std::ostringstream out;
    const char* name = format == TouchstoneFormat::ri ? "RI" : format == TouchstoneFormat::ma ? "MA" : "DB";
    char buf[160];
    std::snprintf(buf, sizeof buf, "# Hz S %s R %.17g\n", name, z0);
    out << buf;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto s = trace.s11[i];
        double a = 0.0, b = 0.0;
        switch (format) {
        case TouchstoneFormat::ri: a = s.real(); b = s.imag(); break;
        case TouchstoneFormat::ma: a = std::abs(s); b = std::arg(s) * 180.0 / std::numbers::pi; break;
        case TouchstoneFormat::db:
            a = 20.0 * std::log10(std::abs(s));
            b = std::arg(s) * 180.0 / std::numbers::pi;
            break;
        }
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", trace.frequencies[i], a, b);
        out << buf;
    }
    return out.str();
}

}  // namespace purcell::io
