// Common vocabulary types and error classes for the blind estimation library.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace blindest {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;
using RealVector = std::vector<double>;

/// A caller supplied an out-of-range parameter (negative variance, p outside (0,1], ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The observation carries no information for the requested estimate
/// (all-zero vector, zero noise estimate, empty input).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An analytical oracle was evaluated outside the hypotheses of its result.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or non-finite data at an I/O or validation boundary.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

inline void require_nonempty(std::size_t n, const char* who) {
  if (n == 0) throw DegenerateInputError(std::string(who) + ": empty input");
}

inline void require_finite(std::span<const cplx> y, const char* who) {
  for (const cplx& v : y) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DataError(std::string(who) + ": non-finite entry");
    }
  }
}

}  // namespace detail

/// ||y||_2^2 / D, the average received power.
inline double mean_power(std::span<const cplx> y) {
  if (y.empty()) return 0.0;
  double acc = 0.0;
  for (const cplx& v : y) acc += std::norm(v);
  return acc / static_cast<double>(y.size());
}

}  // namespace blindest
