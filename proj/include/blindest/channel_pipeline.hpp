// Desk-scale beamspace channel estimation: synthetic sparse beamspace channels,
// noisy ML estimates, the unitary spatial DFT, 1-bit quantization and
// column-wise SURE denoising in the beamspace domain.
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "blindest/core.hpp"
#include "blindest/rng.hpp"
#include "blindest/signal_model.hpp"
#include "blindest/sure_denoiser.hpp"

namespace blindest {

enum class Domain { antenna, beamspace };

/// D x U complex matrix (rows: antennas or beams, columns: users), stored
/// column-major so each user's channel vector is contiguous.
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(std::size_t rows, std::size_t cols, Domain domain = Domain::antenna)
      : rows_(rows), cols_(cols), domain_(domain), data_(rows * cols, cplx{0.0, 0.0}) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<cplx> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const cplx> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  double frobenius_sq() const {
    double acc = 0.0;
    for (const cplx& v : data_) acc += std::norm(v);
    return acc;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Domain domain_ = Domain::antenna;
  ComplexVector data_;
};

namespace detail {

// In-place iterative radix-2 DFT, X_k = sum_n x_n e^{sign 2 pi i k n / N} / sqrt(N).
inline void unitary_fft_inplace(std::span<cplx> x, int sign) {
  const std::size_t n = x.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw ParameterError("unitary_dft: length " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Direct twiddles (no recurrence) keep round-trip error near machine precision.
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = x[i + k];
        const cplx v = x[i + k + half] * w;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (cplx& v : x) v *= scale;
}

}  // namespace detail

/// Column-wise unitary DFT: antenna domain -> beamspace.
inline ChannelMatrix unitary_dft(ChannelMatrix m) {
  for (std::size_t c = 0; c < m.cols(); ++c) detail::unitary_fft_inplace(m.column(c), -1);
  m.set_domain(Domain::beamspace);
  return m;
}

/// Column-wise inverse unitary DFT: beamspace -> antenna domain.
inline ChannelMatrix inverse_unitary_dft(ChannelMatrix m) {
  for (std::size_t c = 0; c < m.cols(); ++c) detail::unitary_fft_inplace(m.column(c), +1);
  m.set_domain(Domain::antenna);
  return m;
}

/// H + N with N i.i.d. CN(0, N0_CE); orthogonal pilots make this the ML estimate.
inline ChannelMatrix ml_estimate(const ChannelMatrix& h, double noise_var, Rng& rng) {
  detail::require(noise_var >= 0.0 && std::isfinite(noise_var), "ml_estimate: noise variance must be >= 0");
  ChannelMatrix out = h;
  if (noise_var > 0.0) {
    for (cplx& v : out.data()) v += rng.complex_normal(noise_var);
  }
  return out;
}

/// U independent BCG columns in the beamspace domain.
inline ChannelMatrix synth_sparse_channel(std::size_t rows, std::size_t users, double p, double nonzero_var,
                                          Rng& rng) {
  const BcgParams params{rows, p, nonzero_var, 0.0};
  params.validate();
  detail::require(users >= 1, "synth_sparse_channel: need at least one user");
  ChannelMatrix h(rows, users, Domain::beamspace);
  for (std::size_t u = 0; u < users; ++u) {
    const ComplexVector col = sample_bcg(params, rng);
    std::copy(col.begin(), col.end(), h.column(u).begin());
  }
  return h;
}

inline double sign_bit(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// sign(Re x) + j sign(Im x), with sign(0) = +1.
inline cplx one_bit(cplx x) { return {sign_bit(x.real()), sign_bit(x.imag())}; }

struct QuantizedObservation {
  ChannelMatrix entries;
  double effective_noise_power = 0.0;  // Q0 when the generating powers are known, else 0
};

/// Power of the noise-plus-quantization error Q(h + n) - h per entry,
/// for h ~ CN(0, Es) and n ~ CN(0, N0): 2 + Es - 4 Es / sqrt(pi (Es + N0)).
inline double effective_quant_noise_power(double signal_power, double noise_var) {
  if (!(signal_power >= 0.0) || !(noise_var >= 0.0) || !(signal_power + noise_var > 0.0)) {
    throw DomainError("effective_quant_noise_power: need Es, N0 >= 0 and Es + N0 > 0");
  }
  return 2.0 + signal_power - 4.0 * signal_power / std::sqrt(std::numbers::pi * (signal_power + noise_var));
}

inline QuantizedObservation one_bit_quantize(const ChannelMatrix& m) {
  QuantizedObservation q{m, 0.0};
  for (cplx& v : q.entries.data()) v = one_bit(v);
  return q;
}

inline QuantizedObservation one_bit_quantize(const ChannelMatrix& m, double signal_power, double noise_var) {
  QuantizedObservation q = one_bit_quantize(m);
  q.effective_noise_power = effective_quant_noise_power(signal_power, noise_var);
  return q;
}

struct ChannelDenoiseResult {
  ChannelMatrix estimate;  // antenna domain
  std::vector<double> thresholds;
  std::vector<double> noise_powers;
};

/// Beamspace soft-threshold denoising of an antenna-domain observation, one
/// SURE-optimal threshold per user column.
inline ChannelDenoiseResult denoise_channel_detailed(const ChannelMatrix& observed, const NoiseMode& mode,
                                                     bool quantized) {
  if (observed.domain() != Domain::antenna) throw ParameterError("denoise_channel: expects antenna-domain input");
  detail::require_finite(observed.data(), "denoise_channel");
  if (quantized) {
    for (const cplx& v : observed.data()) {
      if (std::abs(v.real()) != 1.0 || std::abs(v.imag()) != 1.0) {
        throw DataError("denoise_channel: quantized input must have entries in {+-1 +- j}");
      }
    }
  }
  ChannelMatrix beams = unitary_dft(observed);
  ChannelDenoiseResult res;
  for (std::size_t u = 0; u < beams.cols(); ++u) {
    auto col = beams.column(u);
    DenoiseResult r = denoise(col, mode);
    std::copy(r.s_hat.begin(), r.s_hat.end(), col.begin());
    res.thresholds.push_back(r.threshold);
    res.noise_powers.push_back(r.noise_power_used);
  }
  res.estimate = inverse_unitary_dft(std::move(beams));
  return res;
}

inline ChannelMatrix denoise_channel(const ChannelMatrix& observed, const NoiseMode& mode, bool quantized = false) {
  return denoise_channel_detailed(observed, mode, quantized).estimate;
}

/// ||H_hat - H||_F^2 / (D U).
inline double channel_mse(const ChannelMatrix& estimate, const ChannelMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw ParameterError("channel_mse: shape mismatch");
  }
  double acc = 0.0;
  const auto a = estimate.data();
  const auto b = truth.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

}  // namespace blindest
