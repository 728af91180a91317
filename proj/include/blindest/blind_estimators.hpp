// Closed-form blind estimators for noisy sparse observations y = s + n:
// noise power (median based), signal power, SNR, activity rate and the
// parametric noise power that averages the large-dimension bounds.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "blindest/core.hpp"
#include "blindest/robust_stats.hpp"

namespace blindest {

/// Upper clamp applied to every activity-rate estimate so log((2-2p)/(1-2p)) stays finite.
inline constexpr double kActivityRateClamp = 0.499;

/// median(|y|^2) / log 2. Exact for pure CN(0, N0) noise in the large-D limit
/// and pessimistic (overestimating) when sparse signal entries are present.
inline double estimate_noise_power(std::span<const cplx> y) {
  detail::require_nonempty(y.size(), "estimate_noise_power");
  detail::require_finite(y, "estimate_noise_power");
  RealVector z = abs_squared(y);
  return sample_median_inplace(z) / std::numbers::ln2;
}

/// [||y||^2/D - N0_hat]_+
inline double estimate_signal_power(std::span<const cplx> y, double noise_power_hat) {
  detail::require(noise_power_hat >= 0.0, "estimate_signal_power: noise estimate must be >= 0");
  return std::max(mean_power(y) - noise_power_hat, 0.0);
}

/// [||y||^2/(D N0_hat) - 1]_+
inline double estimate_snr(std::span<const cplx> y, double noise_power_hat) {
  if (!(noise_power_hat > 0.0)) {
    throw DegenerateInputError("estimate_snr: noise power estimate is zero");
  }
  return std::max(mean_power(y) / noise_power_hat - 1.0, 0.0);
}

/// p_hat(q, r) = min{0.499, (1/D) (||y||_q / ||y||_r)^(1/(1/q - 1/r))}, 1 <= q < r <= inf.
inline double estimate_activity_rate(std::span<const cplx> y, double q = 1.0, double r = kInfNorm) {
  detail::require(q >= 1.0 && q < r, "estimate_activity_rate: need 1 <= q < r");
  detail::require_nonempty(y.size(), "estimate_activity_rate");
  const double nq = lq_norm(y, q);
  const double nr = lq_norm(y, r);
  if (!(nr > 0.0)) throw DegenerateInputError("estimate_activity_rate: all-zero observation");
  const double exponent = 1.0 / (1.0 / q - (std::isinf(r) ? 0.0 : 1.0 / r));
  const double raw = std::pow(nq / nr, exponent) / static_cast<double>(y.size());
  return std::min(kActivityRateClamp, raw);
}

/// Sandwich combination from precomputed N0_hat, SNR_hat and p_hat:
/// (N0_hat/2) (max{log 2 / log((2-2p)/(1-2p)), 1/(1+SNR)} + (1-p) + p^2/(p+SNR)).
/// p_hat is clamped to 0.499; p_hat + SNR_hat = 0 uses the limit p^2/(p+0) = p.
inline double sandwich_noise_power(double noise_power_hat, double snr_hat, double p_hat) {
  detail::require(p_hat >= 0.0, "sandwich_noise_power: activity rate must be >= 0");
  detail::require(snr_hat >= 0.0, "sandwich_noise_power: SNR must be >= 0");
  const double p = std::min(kActivityRateClamp, p_hat);
  const double lb_factor =
      std::max(std::numbers::ln2 / std::log((2.0 - 2.0 * p) / (1.0 - 2.0 * p)), 1.0 / (1.0 + snr_hat));
  const double denom = p + snr_hat;
  const double tail = denom > 0.0 ? p * p / denom : p;
  return 0.5 * noise_power_hat * (lb_factor + (1.0 - p) + tail);
}

inline double estimate_noise_power_parametric(std::span<const cplx> y, double p_hat) {
  const double n0 = estimate_noise_power(y);
  const double snr = estimate_snr(y, n0);
  return sandwich_noise_power(n0, snr, p_hat);
}

/// Everything a trial needs from a single median evaluation.
struct EstimateReport {
  double noise_power_hat = 0.0;
  double signal_power_hat = 0.0;
  double snr_hat = 0.0;
  double activity_rate_hat = 0.0;
  double noise_power_parametric_hat = 0.0;
};

inline EstimateReport estimate_all(std::span<const cplx> y, double q = 1.0, double r = kInfNorm) {
  EstimateReport rep;
  rep.noise_power_hat = estimate_noise_power(y);
  rep.signal_power_hat = estimate_signal_power(y, rep.noise_power_hat);
  rep.snr_hat = estimate_snr(y, rep.noise_power_hat);
  rep.activity_rate_hat = estimate_activity_rate(y, q, r);
  rep.noise_power_parametric_hat =
      sandwich_noise_power(rep.noise_power_hat, rep.snr_hat, rep.activity_rate_hat);
  return rep;
}

}  // namespace blindest
