#pragma once

#include <numbers>

namespace purcell {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Internal frequencies are angular (rad/s); files and the CLI speak Hz.
[[nodiscard]] constexpr double to_angular(double freq_hz) noexcept { return kTwoPi * freq_hz; }
[[nodiscard]] constexpr double to_hz(double omega) noexcept { return omega / kTwoPi; }

}  // namespace purcell
