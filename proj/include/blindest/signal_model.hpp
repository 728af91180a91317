// Bernoulli complex Gaussian (BCG) sparse signals, AWGN observations and
// genie-aided reference statistics.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "blindest/core.hpp"
#include "blindest/rng.hpp"

namespace blindest {

/// Generative parameters: D entries, each nonzero with probability p and then
/// CN(0, Eh); additive noise CN(0, N0).
struct BcgParams {
  std::size_t dimension = 1;
  double activity_rate = 1.0;
  double nonzero_variance = 1.0;
  double noise_variance = 1.0;

  double signal_power() const { return activity_rate * nonzero_variance; }
  double snr() const { return signal_power() / noise_variance; }

  /// Parameters for a target SNR = p*Eh/N0.
  static BcgParams from_snr(std::size_t dim, double p, double snr, double noise_var = 1.0) {
    return BcgParams{dim, p, snr * noise_var / p, noise_var};
  }

  void validate() const {
    detail::require(dimension >= 1, "BcgParams: dimension must be >= 1");
    detail::require(activity_rate > 0.0 && activity_rate <= 1.0,
                    "BcgParams: activity rate must lie in (0, 1]");
    detail::require(nonzero_variance >= 0.0 && std::isfinite(nonzero_variance),
                    "BcgParams: nonzero variance must be finite and >= 0");
    detail::require(noise_variance >= 0.0 && std::isfinite(noise_variance),
                    "BcgParams: noise variance must be finite and >= 0");
  }
};

/// s, n and y = s + n as generated.
struct TrialSample {
  ComplexVector s;
  ComplexVector n;
  ComplexVector y;
};

struct GenieStats {
  double noise_power = 0.0;   // ||n||^2 / D
  double signal_power = 0.0;  // ||s||^2 / D
  double snr = 0.0;           // infinite when noise_power == 0 and signal_power > 0
  bool snr_infinite = false;
};

inline ComplexVector sample_bcg(const BcgParams& params, Rng& rng) {
  params.validate();
  ComplexVector s(params.dimension, cplx{0.0, 0.0});
  for (auto& v : s) {
    // The Gaussian is drawn only for active entries; the Bernoulli draw always happens.
    if (rng.bernoulli(params.activity_rate)) v = rng.complex_normal(params.nonzero_variance);
  }
  return s;
}

inline TrialSample add_noise(ComplexVector s, double noise_variance, Rng& rng) {
  detail::require(noise_variance >= 0.0 && std::isfinite(noise_variance),
                  "add_noise: noise variance must be finite and >= 0");
  TrialSample t;
  t.n.resize(s.size());
  t.y.resize(s.size());
  for (std::size_t d = 0; d < s.size(); ++d) {
    t.n[d] = noise_variance > 0.0 ? rng.complex_normal(noise_variance) : cplx{0.0, 0.0};
    t.y[d] = s[d] + t.n[d];
  }
  t.s = std::move(s);
  return t;
}

/// One complete draw of System Model 1.
inline TrialSample sample_trial(const BcgParams& params, Rng& rng) {
  auto s = sample_bcg(params, rng);
  return add_noise(std::move(s), params.noise_variance, rng);
}

inline GenieStats genie_stats(const TrialSample& t) {
  GenieStats g;
  g.noise_power = mean_power(t.n);
  g.signal_power = mean_power(t.s);
  if (g.noise_power > 0.0) {
    g.snr = g.signal_power / g.noise_power;
  } else if (g.signal_power > 0.0) {
    g.snr = std::numeric_limits<double>::infinity();
    g.snr_infinite = true;
  }
  return g;
}

}  // namespace blindest
