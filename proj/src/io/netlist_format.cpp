#include "purcell/io/netlist_format.hpp"

#include "purcell/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace purcell::io {

namespace {

double prefix_scale(char c) {
    switch (c) {
    case 'f': return 1e-15;
    case 'p': return 1e-12;
    case 'n': return 1e-9;
    case 'u': return 1e-6;
    case 'm': return 1e-3;
    case 'k': return 1e3;
    case 'M': return 1e6;
    case 'G': return 1e9;
    default: return 0.0;
    }
}

bool is_unit(std::string_view s) {
    return s == "H" || s == "F" || s == "Ohm" || s == "ohm" || s == "s" || s == "Hz";
}

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ElementKind parse_kind(const std::string& token, int line) {
    std::string k = token;
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::toupper(c); });
    if (k == "R") return ElementKind::resistor;
    if (k == "L") return ElementKind::inductor;
    if (k == "C") return ElementKind::capacitor;
    if (k == "TL") return ElementKind::transmission_line;
    throw ParseError("unknown element kind '" + token + "'", line);
}

}  // namespace

double parse_value(std::string_view token, int line) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr == begin) {
        throw ParseError("malformed value '" + std::string(token) + "'", line);
    }
    std::string_view rest(ptr, static_cast<std::size_t>(end - ptr));
    if (rest.empty() || is_unit(rest)) {
        return v;
    }
    const double scale = prefix_scale(rest.front());
    if (scale != 0.0 && (rest.size() == 1 || is_unit(rest.substr(1)))) {
        return v * scale;
    }
    throw ParseError("malformed value '" + std::string(token) + "'", line);
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return out;
}

SweepSpec parse_range(std::string_view text, int line) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        text.find(':', c2 + 1) != std::string_view::npos) {
        throw ParseError("range must read start:stop:count, got '" + std::string(text) + "'",
                         line);
    }
    SweepSpec s;
    s.start = parse_value(text.substr(0, c1), line);
    s.stop = parse_value(text.substr(c1 + 1, c2 - c1 - 1), line);
    const auto count_text = text.substr(c2 + 1);
    auto [ptr, ec] =
        std::from_chars(count_text.data(), count_text.data() + count_text.size(), s.count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || s.count < 1) {
        throw ParseError("range count must be a positive integer", line);
    }
    if (s.count > 1 && s.start == s.stop) {
        throw ParseError("range bounds must differ", line);
    }
    return s;
}

NetlistDocument parse_netlist_document(std::string_view text) {
    NetlistDocument doc;
    std::map<std::string, int, std::less<>> label_line;
    std::map<std::string, int, std::less<>> node_line;
    bool saw_nodes = false;
    std::string section;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("unterminated section header", line_no);
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const std::set<std::string> known{"nodes", "elements", "ports", "sweeps",
                                                     "subsystems"};
            if (!known.count(section)) {
                throw ParseError("unknown section [" + section + "]", line_no);
            }
            if (section == "nodes") saw_nodes = true;
            continue;
        }
        const auto tok = split_ws(line);
        auto claim_label = [&](const std::string& label) {
            auto [it, fresh] = label_line.emplace(label, line_no);
            if (!fresh) {
                throw ParseError("duplicate label '" + label + "' (first on line " +
                                     std::to_string(it->second) + ")",
                                 line_no);
            }
        };

        if (section.empty()) {
            throw ParseError("content before the first section header", line_no);
        } else if (section == "nodes") {
            for (const auto& n : tok) {
                if (Netlist::is_ground(n)) continue;
                node_line.emplace(n, line_no);
                doc.netlist.add_node(n);
            }
        } else if (section == "elements") {
            if (tok.size() < 5 || tok.size() > 6) {
                throw ParseError("element line needs: label kind node_a node_b value [delay]",
                                 line_no);
            }
            const auto kind = parse_kind(tok[1], line_no);
            const bool line_kind = kind == ElementKind::transmission_line;
            if (line_kind != (tok.size() == 6)) {
                throw ParseError(line_kind ? "transmission line needs a delay"
                                           : "only transmission lines take a delay",
                                 line_no);
            }
            claim_label(tok[0]);
            Element e{tok[0], kind, tok[2], tok[3], parse_value(tok[4], line_no),
                      line_kind ? parse_value(tok[5], line_no) : 0.0};
            if (!saw_nodes) {
                doc.netlist.add_node(e.node_a);
                doc.netlist.add_node(e.node_b);
            }
            doc.netlist.add_element(std::move(e));
        } else if (section == "ports") {
            if (tok.size() < 3 || tok.size() > 4) {
                throw ParseError("port line needs: label node_a node_b [z0]", line_no);
            }
            claim_label(tok[0]);
            if (!saw_nodes) {
                doc.netlist.add_node(tok[1]);
                doc.netlist.add_node(tok[2]);
            }
            doc.netlist.add_port(
                Port{tok[0], tok[1], tok[2], tok.size() == 4 ? parse_value(tok[3], line_no) : 50.0});
        } else if (section == "sweeps") {
            if (tok.size() != 2) {
                throw ParseError("sweep line needs: label start:stop:count", line_no);
            }
            auto s = parse_range(tok[1], line_no);
            s.label = tok[0];
            doc.sweeps.push_back(std::move(s));
        } else if (section == "subsystems") {
            if (tok.size() < 2) {
                throw ParseError("subsystem line needs: name label...", line_no);
            }
            Subsystem sub;
            try {
                sub = Subsystem::parse(tok[0]);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no);
            }
            for (std::size_t i = 1; i < tok.size(); ++i) doc.subsystems[tok[i]] = sub;
        }
    }

    try {
        doc.netlist.validate();
    } catch (const ValidationError& e) {
        int line = 0;
        for (const auto& o : e.offending()) {
            const auto label = o.substr(0, o.find(':'));
            if (auto it = label_line.find(label); it != label_line.end()) {
                line = it->second;
                break;
            }
        }
        throw ParseError(e.what(), line);
    }
    for (const auto& s : doc.sweeps) {
        const auto* el = doc.netlist.find_element(s.label);
        if (el == nullptr) {
            throw ParseError("sweep names unknown element '" + s.label + "'", 0);
        }
    }
    for (const auto& [label, sub] : doc.subsystems) {
        if (doc.netlist.find_element(label) == nullptr) {
            throw ParseError("subsystem lists unknown element '" + label + "'", 0);
        }
    }
    return doc;
}

Netlist parse_netlist(std::string_view text) { return parse_netlist_document(text).netlist; }

std::string serialize_netlist(const NetlistDocument& doc) {
    std::ostringstream out;
    out << "[nodes]\n";
    for (const auto& n : doc.netlist.nodes()) out << n << '\n';
    out << "\n[elements]\n";
    for (const auto& e : doc.netlist.elements()) {
        out << e.label << ' ' << to_string(e.kind) << ' ' << e.node_a << ' ' << e.node_b << ' '
            << format_value(e.value);
        if (e.kind == ElementKind::transmission_line) out << ' ' << format_value(e.delay);
        out << '\n';
    }
    out << "\n[ports]\n";
    for (const auto& p : doc.netlist.ports()) {
        out << p.label << ' ' << p.node_a << ' ' << p.node_b << ' '
            << format_value(p.reference_impedance) << '\n';
    }
    if (!doc.subsystems.empty()) {
        std::map<Subsystem, std::vector<std::string>> grouped;
        for (const auto& [label, sub] : doc.subsystems) grouped[sub].push_back(label);
        out << "\n[subsystems]\n";
        for (const auto& [sub, labels] : grouped) {
            out << sub.name();
            for (const auto& l : labels) out << ' ' << l;
            out << '\n';
        }
    }
    if (!doc.sweeps.empty()) {
        out << "\n[sweeps]\n";
        for (const auto& s : doc.sweeps) {
            out << s.label << ' ' << format_value(s.start) << ':' << format_value(s.stop) << ':'
                << s.count << '\n';
        }
    }
    return out.str();
}

std::string serialize_netlist(const Netlist& net) {
    NetlistDocument doc;
    doc.netlist = net;
    return serialize_netlist(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NetlistDocument read_netlist_file(const std::filesystem::path& path) {
    try {
        return parse_netlist_document(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

}  // namespace purcell::io
