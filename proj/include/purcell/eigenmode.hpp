#pragma once

#include "purcell/mna.hpp"
#include "purcell/netlist.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace purcell {

enum class SubsystemKind { filter, resonator, qubit, other };

/// Physical subsystem a mode or element belongs to, e.g. resonator 3.
struct Subsystem {
    SubsystemKind kind = SubsystemKind::other;
    int index = 0;

    /// "filter", "resonator_3", "qubit_0", "other".
    [[nodiscard]] std::string name() const;
    /// Accepts the forms produced by name(); a bare "resonator" means index 0.
    [[nodiscard]] static Subsystem parse(std::string_view text);

    friend bool operator==(const Subsystem&, const Subsystem&) = default;
    friend auto operator<=>(const Subsystem&, const Subsystem&) = default;
};

/// Element label -> subsystem for the energy-storing elements.
using BranchMap = std::map<std::string, Subsystem, std::less<>>;

/// One complex natural frequency s = -sigma + i omega_d of the terminated network.
struct Mode {
    Complex eigenvalue{};
    double sigma = 0.0;    // rad/s, >= 0
    double omega_d = 0.0;  // rad/s, > 0
    double q = 0.0;        // omega_d / (2 sigma); +inf when sigma == 0
    bool q_infinite = false;
    bool degenerate = false;
    std::map<std::string, double> participation;  // element label -> stored-energy fraction

    Subsystem identity{};
    bool hybridized = false;  // two subsystems each hold a large share
    bool tie = false;

    [[nodiscard]] double frequency_hz() const;
    /// Summed participation of the elements mapped to `subsystem`.
    [[nodiscard]] double participation_in(const BranchMap& map, Subsystem subsystem) const;
};

struct Band {
    double omega_min = 0.0;
    double omega_max = 0.0;

    [[nodiscard]] static Band hz(double f_min, double f_max);
    [[nodiscard]] bool contains(double omega) const noexcept {
        return omega >= omega_min && omega <= omega_max;
    }
};

/// Oscillatory modes of `net` with its ports replaced by their reference
/// resistors, ordered by omega_d. Lumped R/L/C only: transmission lines are
/// rejected with ValidationError.
[[nodiscard]] std::vector<Mode> eigenmodes(const Netlist& net,
                                           std::optional<Band> band = std::nullopt);

/// Every eigenvalue of the first-order state matrix, conjugate pairs and
/// real (overdamped) poles included.
[[nodiscard]] std::vector<Complex> state_spectrum(const Netlist& net);

/// Share of participation below which a mode is not attributed to a subsystem.
inline constexpr double kLabelThreshold = 0.4;

/// Labels each mode with the subsystem holding the largest participation.
/// Modes whose top share is below kLabelThreshold, or whose two leading
/// subsystems both reach it, are labelled `other`. An exact tie between the
/// two leading shares goes to the lower-Q kind (filter, then resonator, then
/// qubit) and sets `tie`.
[[nodiscard]] std::vector<Mode> identify_modes(std::vector<Mode> modes, const BranchMap& map);

struct SweepPoint {
    double value = 0.0;
    std::optional<Mode> mode;  // empty: gap
    bool jump = false;         // participation veto overrode nearest-eigenvalue continuity
};

struct SweepTrace {
    std::string label;
    Subsystem tracked{};
    std::vector<SweepPoint> points;

    [[nodiscard]] std::vector<double> values() const;
};

/// Re-solves the eigenmodes for each inductor value and follows the mode of
/// the tracked subsystem. Values must be positive and strictly monotonic.
[[nodiscard]] SweepTrace sweep_element(const Netlist& net, std::string_view label,
                                       const std::vector<double>& values, Subsystem track,
                                       const BranchMap& map,
                                       std::optional<Band> band = std::nullopt);

}  // namespace purcell
