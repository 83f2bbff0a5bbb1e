#include "qswitch/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qswitch/units.hpp"

namespace qswitch {

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs at least two paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear fit with identical abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

SwapFit fit_swap_rate(std::span<const double> t, std::span<const double> n_src, std::span<const double> n_dst,
                      SwapFitOptions options) {
  if (t.size() != n_src.size() || t.size() != n_dst.size()) throw std::invalid_argument("swap fit: series lengths differ");
  std::vector<double> tt, theta;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double src = std::max(0.0, n_src[k]);
    const double dst = std::max(0.0, n_dst[k]);
    if (src + dst < options.min_population) continue;
    tt.push_back(t[k]);
    theta.push_back(std::atan2(std::sqrt(dst), std::sqrt(src)));
  }
  if (tt.size() < 2) throw std::invalid_argument("swap fit: fewer than two usable points");

  const double quarter = options.quarter_fraction * std::numbers::pi / 2.0;
  std::size_t end = tt.size();
  bool reached = false;
  for (std::size_t k = 0; k < tt.size(); ++k)
    if (theta[k] >= quarter) {
      end = k + 1;
      reached = true;
      break;
    }
  if (!reached)
    for (std::size_t k = 1; k + 1 < tt.size(); ++k)
      if (theta[k] >= theta[k - 1] && theta[k] > theta[k + 1]) {
        end = k + 1;
        break;
      }
  end = std::max<std::size_t>(end, 2);

  SwapFit fit;
  fit.slope = linear_fit(std::span(tt).first(end), std::span(theta).first(end)).first;
  fit.coupling_ghz = fit.slope / kTwoPi;
  fit.swap_frequency_ghz = 2.0 * std::abs(fit.coupling_ghz);
  fit.reached_quarter_swap = reached;
  fit.t_end_ns = tt[end - 1];
  fit.points = static_cast<int>(end);
  return fit;
}

DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> v, double floor) {
  if (t.size() != v.size()) throw std::invalid_argument("decay fit: series lengths differ");
  std::vector<double> tt, lv;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (v[k] > floor) {
      tt.push_back(t[k]);
      lv.push_back(std::log(v[k]));
    }
  const auto [slope, intercept] = linear_fit(tt, lv);
  return {-slope, std::exp(intercept), static_cast<int>(tt.size())};
}

}  // namespace qswitch
