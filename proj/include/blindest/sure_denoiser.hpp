// Soft-thresholding, Stein's unbiased risk estimate (SURE) for complex
// entry-wise estimators, the blind MSE estimate, and the exact SURE-optimal
// threshold search used for nonparametric denoising.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "blindest/blind_estimators.hpp"
#include "blindest/core.hpp"
#include "blindest/em_mixture.hpp"

namespace blindest {

/// eta(x; tau) = (x/|x|) max{|x| - tau, 0}, and 0 at x = 0.
inline cplx soft_threshold(cplx x, double tau) {
  detail::require(tau >= 0.0, "soft_threshold: tau must be >= 0");
  const double mag = std::abs(x);
  if (mag <= tau || mag == 0.0) return {0.0, 0.0};
  return x * ((mag - tau) / mag);
}

/// d Re(eta)/d Re(y) + d Im(eta)/d Im(y) for soft-thresholding: 2 - tau/|y| above
/// the threshold, 0 on and below it.
inline double soft_threshold_divergence(cplx x, double tau) {
  const double mag = std::abs(x);
  return mag > tau ? 2.0 - tau / mag : 0.0;
}

/// Generic SURE for an entry-wise estimator given as callbacks:
/// (1/D)||eta(y) - y||^2 - N0 + (N0/D) sum_d div(y_d).
template <class Eta, class Div>
  requires std::invocable<Eta, cplx> && std::invocable<Div, cplx>
double sure(std::span<const cplx> y, double noise_power, Eta&& eta, Div&& divergence) {
  detail::require_nonempty(y.size(), "sure");
  double residual = 0.0, div = 0.0;
  for (const cplx& v : y) {
    residual += std::norm(eta(v) - v);
    div += divergence(v);
  }
  const double n = static_cast<double>(y.size());
  return residual / n - noise_power + noise_power * div / n;
}

/// Closed-form SURE of soft-thresholding at threshold tau.
inline double sure_soft_threshold(std::span<const cplx> y, double tau, double noise_power) {
  detail::require(tau >= 0.0, "sure_soft_threshold: tau must be >= 0");
  detail::require(noise_power >= 0.0, "sure_soft_threshold: noise power must be >= 0");
  detail::require_nonempty(y.size(), "sure_soft_threshold");
  double residual = 0.0, div = 0.0;
  for (const cplx& v : y) {
    const double mag = std::abs(v);
    if (mag <= tau) {
      residual += mag * mag;
    } else {
      residual += tau * tau;
      div += 2.0 - tau / mag;
    }
  }
  const double n = static_cast<double>(y.size());
  return residual / n - noise_power + noise_power * div / n;
}

/// Blind MSE of soft-thresholding: SURE with N0 replaced by the median estimate.
inline double blind_mse_estimate(std::span<const cplx> y, double tau) {
  return sure_soft_threshold(y, tau, estimate_noise_power(y));
}

struct ThresholdChoice {
  double tau = 0.0;
  double sure = 0.0;
};

/// Global minimizer of the soft-threshold SURE over tau in [0, max|y_d|].
///
/// With magnitudes sorted ascending a_1 <= ... <= a_D, SURE restricted to
/// [a_j, a_{j+1}) is the quadratic
///   (1/D)(sum_{i<=j} a_i^2 + k tau^2) - N0 + (N0/D)(2k - tau sum_{i>j} 1/a_i),  k = D - j,
/// minimized at tau = N0 sum_{i>j}(1/a_i) / (2k). SURE drops by N0/D when tau
/// crosses an a_i, so checking each left endpoint and each clamped stationary
/// point covers every candidate. O(D log D), dominated by the sort.
inline ThresholdChoice optimal_threshold(std::span<const cplx> y, double noise_power) {
  detail::require(noise_power >= 0.0, "optimal_threshold: noise power must be >= 0");
  detail::require_nonempty(y.size(), "optimal_threshold");
  const std::size_t n = y.size();
  const double dn = static_cast<double>(n);

  RealVector a(n);
  for (std::size_t d = 0; d < n; ++d) a[d] = std::abs(y[d]);
  std::stable_sort(a.begin(), a.end());

  // prefix_sq[j] = sum_{i<j} a_i^2, suffix_inv[j] = sum_{i>=j} 1/a_i (0-based).
  RealVector prefix_sq(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix_sq[j + 1] = prefix_sq[j] + a[j] * a[j];
  RealVector suffix_inv(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) suffix_inv[j] = suffix_inv[j + 1] + (a[j] > 0.0 ? 1.0 / a[j] : 0.0);

  auto sure_on = [&](std::size_t j, double tau) {
    const double k = static_cast<double>(n - j);
    return (prefix_sq[j] + k * tau * tau) / dn - noise_power + noise_power * (2.0 * k - tau * suffix_inv[j]) / dn;
  };

  ThresholdChoice best{0.0, std::numeric_limits<double>::infinity()};
  auto consider = [&](double tau, double value) {
    if (value < best.sure) best = {tau, value};
  };

  // j = number of entries with magnitude <= tau on the interval [left, a[j]).
  for (std::size_t j = 0; j <= n; ++j) {
    const double left = j == 0 ? 0.0 : a[j - 1];
    // Skip j where the interval is empty because of ties (or zero magnitudes at j = 0).
    if (j < n && a[j] <= left) continue;
    consider(left, sure_on(j, left));
    if (j < n && noise_power > 0.0) {
      const double k = static_cast<double>(n - j);
      const double stationary = noise_power * suffix_inv[j] / (2.0 * k);
      if (stationary > left && stationary < a[j]) consider(stationary, sure_on(j, stationary));
    }
  }
  return best;
}

/// Noise power is known (e.g. genie N0, or Q0 for the 1-bit pipeline).
struct KnownNoise {
  double noise_power = 0.0;
};
/// Noise power from median(|y|^2)/log 2.
struct MedianBlind {};
/// Noise power from EM started at noise_fraction * ||y||^2/D and p_hat(1, inf).
struct EmBlind {
  int max_iterations = 30;
  double tolerance = 1e-3;
  double noise_fraction = 0.4;
};
using NoiseMode = std::variant<KnownNoise, MedianBlind, EmBlind>;

struct DenoiseResult {
  ComplexVector s_hat;
  double threshold = 0.0;
  double mse_estimate = 0.0;  // SURE at the threshold; may be negative
  double noise_power_used = 0.0;
};

inline double noise_power_for(std::span<const cplx> y, const NoiseMode& mode) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KnownNoise>) {
          detail::require(m.noise_power >= 0.0, "denoise: known noise power must be >= 0");
          return m.noise_power;
        } else if constexpr (std::is_same_v<M, MedianBlind>) {
          return estimate_noise_power(y);
        } else {
          return em_estimate(y, baseline_config(y, m.noise_fraction, m.max_iterations, m.tolerance)).noise_power;
        }
      },
      mode);
}

inline DenoiseResult denoise(std::span<const cplx> y, const NoiseMode& mode) {
  detail::require_nonempty(y.size(), "denoise");
  detail::require_finite(y, "denoise");
  DenoiseResult out;
  out.noise_power_used = noise_power_for(y, mode);
  const ThresholdChoice choice = optimal_threshold(y, out.noise_power_used);
  out.threshold = choice.tau;
  out.mse_estimate = choice.sure;
  out.s_hat.resize(y.size());
  for (std::size_t d = 0; d < y.size(); ++d) out.s_hat[d] = soft_threshold(y[d], choice.tau);
  return out;
}

}  // namespace blindest
