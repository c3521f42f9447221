#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace purcell {

enum class ElementKind { resistor, inductor, capacitor, transmission_line };

[[nodiscard]] std::string_view to_string(ElementKind kind) noexcept;

/// One two-terminal lumped element, or a transmission-line segment running
/// from node_a to node_b with ground as its common return.
struct Element {
    std::string label;
    ElementKind kind = ElementKind::resistor;
    std::string node_a;
    std::string node_b;
    double value = 0.0;  // ohms, henries, farads, or line impedance in ohms
    double delay = 0.0;  // one-way delay in seconds (lines only)

    [[nodiscard]] bool stores_energy() const noexcept {
        return kind == ElementKind::inductor || kind == ElementKind::capacitor;
    }

    friend bool operator==(const Element&, const Element&) = default;
};

struct Port {
    std::string label;
    std::string node_a;
    std::string node_b;
    double reference_impedance = 50.0;

    friend bool operator==(const Port&, const Port&) = default;
};

/// Linear microwave network: declared nodes (ground is implicit), elements
/// and ports. Value type; response operations validate on entry.
class Netlist {
public:
    static constexpr std::string_view ground = "gnd";

    /// Maps the accepted ground aliases ("0", "gnd", "GND") to `ground`.
    [[nodiscard]] static std::string canonical_node(std::string_view name);
    [[nodiscard]] static bool is_ground(std::string_view name);

    Netlist& add_node(std::string name);
    Netlist& add_element(Element element);
    Netlist& add_port(Port port);

    Netlist& add_resistor(std::string label, std::string a, std::string b, double ohms);
    Netlist& add_inductor(std::string label, std::string a, std::string b, double henries);
    Netlist& add_capacitor(std::string label, std::string a, std::string b, double farads);
    Netlist& add_line(std::string label, std::string a, std::string b, double z0, double delay);
    Netlist& add_port(std::string label, std::string a, std::string b, double z0 = 50.0);

    /// Throws ValidationError naming every offending element or port.
    void validate() const;
    /// Ports must be present for any port-response operation.
    void validate_with_ports() const;

    /// Non-ground nodes in declaration order.
    [[nodiscard]] const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Element>& elements() const noexcept { return elements_; }
    [[nodiscard]] const std::vector<Port>& ports() const noexcept { return ports_; }

    /// Matrix index of a node, std::nullopt for ground; throws for unknown names.
    [[nodiscard]] std::optional<int> node_index(std::string_view name) const;
    [[nodiscard]] bool has_node(std::string_view name) const;

    [[nodiscard]] const Element* find_element(std::string_view label) const;
    [[nodiscard]] const Port* find_port(std::string_view label) const;

    /// Copy with one element's primary value replaced.
    [[nodiscard]] Netlist with_value(std::string_view label, double value) const;
    /// Copy with the named element removed and a port placed across its terminals.
    [[nodiscard]] Netlist with_element_as_port(std::string_view label, std::string port_label,
                                               double z0 = 50.0) const;
    /// Copy in which every port is replaced by a resistor of its reference impedance.
    [[nodiscard]] Netlist with_ports_terminated() const;

    friend bool operator==(const Netlist&, const Netlist&) = default;

private:
    std::vector<std::string> nodes_;
    std::vector<Element> elements_;
    std::vector<Port> ports_;
};

/// Strictly increasing set of angular frequencies (rad/s), all positive.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> omegas);

    /// `count` points evenly spaced in Hz from f_start to f_stop inclusive.
    [[nodiscard]] static FrequencyGrid linear_hz(double f_start, double f_stop, int count);
    [[nodiscard]] static FrequencyGrid from_hz(const std::vector<double>& freqs_hz);

    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

private:
    std::vector<double> points_;
};

}  // namespace purcell
