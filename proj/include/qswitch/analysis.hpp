#pragma once

#include <span>

namespace qswitch {

/// Result of fitting theta(t) = atan(sqrt(n_dst / n_src)) linearly in time.
/// For a resonant exchange of strength G (GHz) theta = 2 pi G t, so
/// coupling_ghz = slope / 2 pi and populations oscillate at 2 G.
struct SwapFit {
  double slope = 0.0;  // rad/ns
  double coupling_ghz = 0.0;
  double swap_frequency_ghz = 0.0;
  bool reached_quarter_swap = false;  // theta got to 0.8 * pi/2 inside the data
  double t_end_ns = 0.0;              // last time used in the fit
  int points = 0;
};

struct SwapFitOptions {
  double quarter_fraction = 0.8;
  double min_population = 1e-9;  // points with n_src + n_dst below are skipped
};

/// Throws std::invalid_argument for mismatched lengths or fewer than two usable points.
SwapFit fit_swap_rate(std::span<const double> t, std::span<const double> n_src, std::span<const double> n_dst,
                      SwapFitOptions options = {});

struct DecayFit {
  double rate_per_ns = 0.0;  // v(t) ~ amplitude exp(-rate t)
  double amplitude = 0.0;
  int points = 0;
};

/// Least-squares fit of log v against t over points with v > floor.
DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> v, double floor = 1e-12);

/// Slope and intercept of the least-squares line.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace qswitch
