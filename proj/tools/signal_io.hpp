#pragma once

#include <filesystem>
#include <optional>

#include "fmdiag/signal.hpp"

namespace fmdiag::io {

// Signal CSV, either
//   sample_rate=<Hz>           followed by one amplitude per line, or
//   time,amplitude             (header optional) with the rate inferred
//                              from the time column.
// Numbers are parsed and printed independently of the C locale.
Signal read_signal_csv(const std::filesystem::path& path, std::optional<double> fallback_rate = std::nullopt);
void write_signal_csv(const Signal& s, const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace fmdiag::io
