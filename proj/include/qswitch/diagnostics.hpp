#pragma once

#include <functional>
#include <string_view>

namespace qswitch {

using WarningHandler = std::function<void(std::string_view)>;

/// Replace the process-wide warning sink (default: one line on stderr).
/// Returns the previous handler. Safe to call concurrently with warn().
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

/// Top-level Fock occupation above which a truncation warning is emitted.
inline constexpr double kTruncationWarningThreshold = 1e-4;

}  // namespace qswitch
