#pragma once

#include "purcell/spectro_fit.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace purcell::io {

/// One-port Touchstone v1. Option line `# <Hz|kHz|MHz|GHz> S <RI|MA|DB> R <z0>`,
/// defaults GHz, MA, 50 ohm; '!' starts a comment. Multi-port data throws
/// UnsupportedError.
[[nodiscard]] ReflectionTrace parse_touchstone(std::string_view text, std::string source = {});
[[nodiscard]] ReflectionTrace read_touchstone(const std::filesystem::path& path);

enum class TouchstoneFormat { ri, ma, db };

/// Writes a one-port file in Hz with the chosen number format.
[[nodiscard]] std::string write_touchstone(const ReflectionTrace& trace,
                                           TouchstoneFormat format = TouchstoneFormat::ri,
                                           double z0 = 50.0);

}  // namespace purcell::io
