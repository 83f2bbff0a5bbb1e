#pragma once

#include <numbers>

// Frequencies are carried as plain frequency in GHz, times in ns, hbar = 1.
// Anything that enters a generator is multiplied by 2 pi first.

namespace qswitch {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double angular(double ghz) { return kTwoPi * ghz; }

constexpr double mhz(double value) { return value * 1e-3; }  // -> GHz

}  // namespace qswitch
