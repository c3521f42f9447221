#include "purcell/netlist.hpp"

#include "purcell/errors.hpp"
#include "purcell/units.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace purcell {

std::string_view to_string(ElementKind kind) noexcept {
    switch (kind) {
    case ElementKind::resistor: return "R";
    case ElementKind::inductor: return "L";
    case ElementKind::capacitor: return "C";
    case ElementKind::transmission_line: return "TL";
    }
    return "?";
}

std::string Netlist::canonical_node(std::string_view name) {
    if (is_ground(name)) {
        return std::string(ground);
    }
    return std::string(name);
}

bool Netlist::is_ground(std::string_view name) {
    return name == "0" || name == "gnd" || name == "GND";
}

Netlist& Netlist::add_node(std::string name) {
    name = canonical_node(name);
    if (name != ground && !has_node(name)) {
        nodes_.push_back(std::move(name));
    }
    return *this;
}

Netlist& Netlist::add_element(Element element) {
    element.node_a = canonical_node(element.node_a);
    element.node_b = canonical_node(element.node_b);
    elements_.push_back(std::move(element));
    return *this;
}

Netlist& Netlist::add_port(Port port) {
    port.node_a = canonical_node(port.node_a);
    port.node_b = canonical_node(port.node_b);
    ports_.push_back(std::move(port));
    return *this;
}

namespace {

Element make_element(std::string label, ElementKind kind, std::string a, std::string b,
                     double value, double delay = 0.0) {
    return Element{std::move(label), kind, std::move(a), std::move(b), value, delay};
}

}  // namespace

Netlist& Netlist::add_resistor(std::string label, std::string a, std::string b, double ohms) {
    add_node(a);
    add_node(b);
    return add_element(make_element(std::move(label), ElementKind::resistor, std::move(a),
                                    std::move(b), ohms));
}

Netlist& Netlist::add_inductor(std::string label, std::string a, std::string b, double henries) {
    add_node(a);
    add_node(b);
    return add_element(make_element(std::move(label), ElementKind::inductor, std::move(a),
                                    std::move(b), henries));
}

Netlist& Netlist::add_capacitor(std::string label, std::string a, std::string b, double farads) {
    add_node(a);
    add_node(b);
    return add_element(make_element(std::move(label), ElementKind::capacitor, std::move(a),
                                    std::move(b), farads));
}

Netlist& Netlist::add_line(std::string label, std::string a, std::string b, double z0,
                           double delay) {
    add_node(a);
    add_node(b);
    return add_element(make_element(std::move(label), ElementKind::transmission_line,
                                    std::move(a), std::move(b), z0, delay));
}

Netlist& Netlist::add_port(std::string label, std::string a, std::string b, double z0) {
    add_node(a);
    add_node(b);
    return add_port(Port{std::move(label), std::move(a), std::move(b), z0});
}

void Netlist::validate() const {
    std::vector<std::string> offending;
    std::set<std::string> labels;

    auto check_terminals = [&](const std::string& label, const std::string& a,
                               const std::string& b) {
        bool ok = true;
        if (a != ground && !has_node(a)) {
            offending.push_back(label + ": undeclared node '" + a + "'");
            ok = false;
        }
        if (b != ground && !has_node(b)) {
            offending.push_back(label + ": undeclared node '" + b + "'");
            ok = false;
        }
        if (ok && a == b) {
            offending.push_back(label + ": both terminals on node '" + a + "'");
        }
    };

    for (const auto& e : elements_) {
        if (e.label.empty()) {
            offending.push_back("<unnamed element>: empty label");
        } else if (!labels.insert(e.label).second) {
            offending.push_back(e.label + ": duplicate label");
        }
        check_terminals(e.label, e.node_a, e.node_b);
        if (!(e.value > 0.0) || !std::isfinite(e.value)) {
            offending.push_back(e.label + ": value must be positive");
        }
        if (e.kind == ElementKind::transmission_line && !(e.delay >= 0.0 && std::isfinite(e.delay))) {
            offending.push_back(e.label + ": delay must be non-negative");
        }
    }
    for (const auto& p : ports_) {
        if (p.label.empty()) {
            offending.push_back("<unnamed port>: empty label");
        } else if (!labels.insert(p.label).second) {
            offending.push_back(p.label + ": duplicate label");
        }
        check_terminals(p.label, p.node_a, p.node_b);
        if (!(p.reference_impedance > 0.0) || !std::isfinite(p.reference_impedance)) {
            offending.push_back(p.label + ": reference impedance must be positive");
        }
    }

    if (!offending.empty()) {
        std::string msg = "invalid netlist:";
        for (const auto& o : offending) {
            msg += "\n  " + o;
        }
        throw ValidationError(msg, std::move(offending));
    }
}

void Netlist::validate_with_ports() const {
    validate();
    if (ports_.empty()) {
        throw ValidationError("netlist has no ports", {"<ports>: empty"});
    }
}

std::optional<int> Netlist::node_index(std::string_view name) const {
    if (is_ground(name)) {
        return std::nullopt;
    }
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end()) {
        throw ValidationError("unknown node '" + std::string(name) + "'",
                              {std::string(name)});
    }
    return static_cast<int>(it - nodes_.begin());
}

bool Netlist::has_node(std::string_view name) const {
    return is_ground(name) || std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

const Element* Netlist::find_element(std::string_view label) const {
    auto it = std::find_if(elements_.begin(), elements_.end(),
                           [&](const Element& e) { return e.label == label; });
    return it == elements_.end() ? nullptr : &*it;
}

const Port* Netlist::find_port(std::string_view label) const {
    auto it = std::find_if(ports_.begin(), ports_.end(),
                           [&](const Port& p) { return p.label == label; });
    return it == ports_.end() ? nullptr : &*it;
}

Netlist Netlist::with_value(std::string_view label, double value) const {
    Netlist copy = *this;
    auto it = std::find_if(copy.elements_.begin(), copy.elements_.end(),
                           [&](const Element& e) { return e.label == label; });
    if (it == copy.elements_.end()) {
        throw ValidationError("no element labelled '" + std::string(label) + "'",
                              {std::string(label)});
    }
    it->value = value;
    return copy;
}

Netlist Netlist::with_element_as_port(std::string_view label, std::string port_label,
                                      double z0) const {
    Netlist copy = *this;
    auto it = std::find_if(copy.elements_.begin(), copy.elements_.end(),
                           [&](const Element& e) { return e.label == label; });
    if (it == copy.elements_.end()) {
        throw ValidationError("no element labelled '" + std::string(label) + "'",
                              {std::string(label)});
    }
    Port port{std::move(port_label), it->node_a, it->node_b, z0};
    copy.elements_.erase(it);
    copy.ports_.push_back(std::move(port));
    return copy;
}

Netlist Netlist::with_ports_terminated() const {
    Netlist copy = *this;
    copy.ports_.clear();
    for (const auto& p : ports_) {
        copy.add_element(Element{p.label, ElementKind::resistor, p.node_a, p.node_b,
                                 p.reference_impedance, 0.0});
    }
    return copy;
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : points_(std::move(omegas)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i] > 0.0) || !std::isfinite(points_[i])) {
            throw DomainError("frequency grid points must be positive and finite");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw DomainError("frequency grid must be strictly increasing");
        }
    }
}

FrequencyGrid FrequencyGrid::linear_hz(double f_start, double f_stop, int count) {
    if (count < 1) {
        throw DomainError("frequency grid needs at least one point");
    }
    if (count > 1 && !(f_stop > f_start)) {
        throw DomainError("frequency grid bounds must be ordered");
    }
    std::vector<double> omegas(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? f_start
                                    : f_start + (f_stop - f_start) * i / (count - 1);
        omegas[static_cast<std::size_t>(i)] = to_angular(f);
    }
    return FrequencyGrid(std::move(omegas));
}

FrequencyGrid FrequencyGrid::from_hz(const std::vector<double>& freqs_hz) {
    std::vector<double> omegas;
    omegas.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        omegas.push_back(to_angular(f));
    }
    return FrequencyGrid(std::move(omegas));
}

}  // namespace purcell
