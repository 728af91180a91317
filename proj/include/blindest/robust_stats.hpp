// Order statistics and norms: expected-linear-time sample median, entry-wise
// absolute square, and lq norms (q >= 1, including q = infinity).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include "blindest/core.hpp"
#include "blindest/rng.hpp"

namespace blindest {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

namespace detail {

// Quickselect with a three-way (Dutch flag) partition so runs of equal keys
// cannot degrade to quadratic time. Pivots come from a fixed-seed stream; the
// returned value never depends on the pivot sequence, only the running time.
inline double quickselect(std::span<double> z, std::size_t k, Rng& pivots) {
  std::size_t lo = 0;
  std::size_t hi = z.size();  // half-open [lo, hi)
  while (hi - lo > 1) {
    const std::size_t width = hi - lo;
    const double pivot = z[lo + static_cast<std::size_t>(pivots() % width)];
    std::size_t lt = lo, i = lo, gt = hi;
    while (i < gt) {
      if (z[i] < pivot) {
        std::swap(z[lt++], z[i++]);
      } else if (z[i] > pivot) {
        std::swap(z[i], z[--gt]);
      } else {
        ++i;
      }
    }
    if (k < lt) {
      hi = lt;
    } else if (k >= gt) {
      lo = gt;
    } else {
      return pivot;
    }
  }
  return z[k];
}

}  // namespace detail

/// Sample median of z, reordering z in place. For even D the result is the
/// midpoint of the two central order statistics.
inline double sample_median_inplace(std::span<double> z) {
  detail::require_nonempty(z.size(), "sample_median");
  for (double v : z) {
    if (std::isnan(v)) throw DataError("sample_median: NaN entry");
  }
  Rng pivots(0x6d656469616eULL);
  const std::size_t n = z.size();
  const std::size_t upper = n / 2;
  const double hi = detail::quickselect(z, upper, pivots);
  if (n % 2 == 1) return hi;
  // After selection every element left of `upper` is <= hi.
  const double lo = *std::max_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(upper));
  return 0.5 * (lo + hi);
}

inline double sample_median(std::span<const double> z) {
  RealVector work(z.begin(), z.end());
  return sample_median_inplace(work);
}

inline RealVector abs_squared(std::span<const cplx> y) {
  RealVector z(y.size());
  for (std::size_t d = 0; d < y.size(); ++d) z[d] = std::norm(y[d]);
  return z;
}

/// (sum |y_d|^q)^(1/q); q = kInfNorm gives max |y_d|.
inline double lq_norm(std::span<const cplx> y, double q) {
  detail::require(q >= 1.0, "lq_norm: q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (const cplx& v : y) m = std::max(m, std::abs(v));
    return m;
  }
  if (q == 1.0) {
    double acc = 0.0;
    for (const cplx& v : y) acc += std::abs(v);
    return acc;
  }
  if (q == 2.0) {
    double acc = 0.0;
    for (const cplx& v : y) acc += std::norm(v);
    return std::sqrt(acc);
  }
  if (q == 4.0) {
    double acc = 0.0;
    for (const cplx& v : y) {
      const double p = std::norm(v);
      acc += p * p;
    }
    return std::sqrt(std::sqrt(acc));
  }
  double acc = 0.0;
  for (const cplx& v : y) acc += std::pow(std::abs(v), q);
  return std::pow(acc, 1.0 / q);
}

}  // namespace blindest
