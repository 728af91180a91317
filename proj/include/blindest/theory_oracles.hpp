// Analytical ground truth for the noisy BCG model: the exact CDF and median of
// |y_d|^2, the large-dimension noise-power bounds and relative-error bracket,
// and the three median bounds they are assembled from. Used as test oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blindest/core.hpp"

namespace blindest::theory {

/// Largest activity rate for which the median concavity argument holds: (e^2-2)/(2e^2-2).
inline double p_max() {
  const double e2 = std::exp(2.0);
  return (e2 - 2.0) / (2.0 * e2 - 2.0);
}

struct NoiseBounds {
  double lower = 0.0;
  double upper = 0.0;
  double median_upper = 0.0;  // median_Z / log 2, the large-D limit of the median estimator
};

namespace detail {
inline void require_p_in_theorem_domain(double p, const char* who) {
  if (!(p > 0.0 && p <= p_max())) throw DomainError(std::string(who) + ": p outside (0, p_max]");
}
// p^2/(p+snr) with the p -> 0, snr = 0 limit.
inline double tail_term(double p, double snr) { return p + snr > 0.0 ? p * p / (p + snr) : p; }
}  // namespace detail

inline NoiseBounds noise_bounds(double median_z, double p, double snr) {
  detail::require_p_in_theorem_domain(p, "noise_bounds");
  if (!(snr >= 0.0)) throw DomainError("noise_bounds: SNR must be >= 0");
  if (!(median_z > 0.0)) throw DomainError("noise_bounds: median must be > 0");
  const double ln2 = std::numbers::ln2;
  NoiseBounds b;
  b.lower = median_z / std::min(std::log((2.0 - 2.0 * p) / (1.0 - 2.0 * p)), ln2 * (1.0 + snr));
  b.upper = median_z / ln2 * ((1.0 - p) + detail::tail_term(p, snr));
  b.median_upper = median_z / ln2;
  return b;
}

struct ErrorBracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Large-dimension bracket on |N0_hat - N0|/N0:
/// lo = 1/(1/SNR + 1/p + 1), hi = min{log((1-p)/(1-2p)), SNR}.
inline ErrorBracket relative_error_bounds(double p, double snr) {
  detail::require_p_in_theorem_domain(p, "relative_error_bounds");
  if (!(snr >= 0.0)) throw DomainError("relative_error_bounds: SNR must be >= 0");
  ErrorBracket e;
  e.lo = snr > 0.0 ? 1.0 / (1.0 / snr + 1.0 / p + 1.0) : 0.0;
  e.hi = std::min(std::log((1.0 - p) / (1.0 - 2.0 * p)), snr);
  return e;
}

/// Bracket obtained directly from noise_bounds: ((median/log2 - UB)/UB, (median/log2 - LB)/LB).
/// Independent of median_Z; equals lo = 1/(1/SNR + 1/p - 1), hi = min{log((1-p)/(1-2p))/log 2, SNR}.
inline ErrorBracket relative_error_bounds_from_noise_bounds(double p, double snr) {
  const NoiseBounds b = noise_bounds(1.0, p, snr);
  return {(b.median_upper - b.upper) / b.upper, (b.median_upper - b.lower) / b.lower};
}

/// CDF of |y_d|^2 for a noisy BCG entry: (1-p)(1-e^{-z/N0}) + p(1-e^{-z/(N0+Eh)}).
inline double bcg_power_cdf(double z, double p, double noise_var, double nonzero_var) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bcg_power_cdf: p outside [0, 1]");
  if (!(noise_var > 0.0) || !(nonzero_var >= 0.0)) throw DomainError("bcg_power_cdf: invalid variances");
  if (z <= 0.0) return 0.0;
  return (1.0 - p) * -std::expm1(-z / noise_var) + p * -std::expm1(-z / (noise_var + nonzero_var));
}

/// Median of |y_d|^2 by bisection on the CDF to relative tolerance 1e-12.
inline double true_median(double p, double noise_var, double nonzero_var) {
  const double ln2 = std::numbers::ln2;
  double lo = 0.0;
  double hi = 2.0 * (noise_var + nonzero_var) * ln2 + 1e-300;
  (void)bcg_power_cdf(hi, p, noise_var, nonzero_var);  // validates parameters
  for (int it = 0; it < 2000 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bcg_power_cdf(mid, p, noise_var, nonzero_var) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct MedianBounds {
  double ub_sparse = 0.0;   // N0 log((2-2p)/(1-2p)), needs p < 1/2
  double ub_jensen = 0.0;   // log 2 (N0 + Es), needs p <= p_max
  double lb = 0.0;          // log 2 N0 / ((1-p) + p^2/(p+SNR))
};

inline MedianBounds median_lemma_bounds(double p, double noise_var, double signal_power) {
  detail::require_p_in_theorem_domain(p, "median_lemma_bounds");
  if (!(noise_var > 0.0) || !(signal_power >= 0.0)) {
    throw DomainError("median_lemma_bounds: need N0 > 0 and Es >= 0");
  }
  const double ln2 = std::numbers::ln2;
  const double snr = signal_power / noise_var;
  MedianBounds m;
  m.ub_sparse = noise_var * std::log((2.0 - 2.0 * p) / (1.0 - 2.0 * p));
  m.ub_jensen = ln2 * (noise_var + signal_power);
  m.lb = ln2 * noise_var / ((1.0 - p) + detail::tail_term(p, snr));
  return m;
}

}  // namespace blindest::theory
