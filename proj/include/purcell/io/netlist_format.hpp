#pragma once

#include "purcell/eigenmode.hpp"
#include "purcell/netlist.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace purcell::io {

/// `label start:stop:count`; values spaced evenly, endpoints included.
struct SweepSpec {
    std::string label;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    [[nodiscard]] std::vector<double> values() const;
    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Parsed netlist text: the network plus optional sweep and subsystem sections.
struct NetlistDocument {
    Netlist netlist;
    std::vector<SweepSpec> sweeps;
    BranchMap subsystems;  // element label -> subsystem
};

/// Number with optional SI prefix (f p n u m k M G) and optional unit
/// (H, F, Ohm, s, Hz), e.g. "1.8nH", "50", "1.73fF". Throws ParseError.
[[nodiscard]] double parse_value(std::string_view token, int line = 0);

/// "start:stop:count", each bound accepting parse_value syntax.
[[nodiscard]] SweepSpec parse_range(std::string_view text, int line = 0);

/// Sections [nodes], [elements], [ports], [sweeps], [subsystems]; '#'
/// starts a comment. Errors carry the 1-based line number.
[[nodiscard]] NetlistDocument parse_netlist_document(std::string_view text);
[[nodiscard]] Netlist parse_netlist(std::string_view text);

[[nodiscard]] std::string serialize_netlist(const NetlistDocument& doc);
[[nodiscard]] std::string serialize_netlist(const Netlist& net);

[[nodiscard]] NetlistDocument read_netlist_file(const std::filesystem::path& path);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace purcell::io
