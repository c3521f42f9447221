#pragma once

#include "purcell/netlist.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace purcell {

using Complex = std::complex<double>;

/// Nodal admittance matrix over the non-ground nodes (netlist node order).
/// Ports are not stamped. Throws ValidationError / DomainError.
[[nodiscard]] Eigen::MatrixXcd assemble_admittance(const Netlist& net, double omega);

/// Result of a single-frequency solve. When `pole` is set the network is
/// singular at this frequency (a lossless resonance was hit) and `value`
/// carries no meaning; `diagnostic` says why.
struct PortResponse {
    double omega = 0.0;
    Complex admittance{0.0, 0.0};
    bool pole = false;
    std::string diagnostic;
};

/// Admittance seen looking into `port_label`, every other port terminated in
/// its reference impedance.
[[nodiscard]] PortResponse port_admittance(const Netlist& net, std::string_view port_label,
                                           double omega);

[[nodiscard]] std::vector<PortResponse> port_admittance_sweep(const Netlist& net,
                                                              std::string_view port_label,
                                                              const FrequencyGrid& grid);

struct SParameterSample {
    double omega = 0.0;
    Eigen::MatrixXcd s;  // ports in netlist order, power waves on each reference impedance
    bool pole = false;
    std::string diagnostic;
};

[[nodiscard]] std::vector<SParameterSample> s_parameters(const Netlist& net,
                                                         const FrequencyGrid& grid);

}  // namespace purcell
