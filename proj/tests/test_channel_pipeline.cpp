#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blindest/channel_pipeline.hpp"
#include "test_support.hpp"

using namespace blindest;

namespace {

ChannelMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ChannelMatrix m(rows, cols);
  for (cplx& v : m.data()) v = rng.complex_normal(2.0);
  return m;
}

double relative_diff(const ChannelMatrix& a, const ChannelMatrix& b) {
  return std::sqrt(channel_mse(a, b) / (b.frobenius_sq() / static_cast<double>(b.rows() * b.cols())));
}

// Antenna-domain channel with sparse beamspace columns and the matching ML observation.
struct ChannelTrial {
  ChannelMatrix h;
  ChannelMatrix h_ml;
};

ChannelTrial channel_trial(std::uint64_t seed, std::uint64_t t, double p, double es, double n0) {
  Rng rng = Rng::derive(seed, {t});
  ChannelTrial out;
  out.h = inverse_unitary_dft(synth_sparse_channel(128, 8, p, es / p, rng));
  out.h_ml = ml_estimate(out.h, n0, rng);
  return out;
}

}  // namespace

TEST(UnitaryDft, MatchesDirectSum) {
  const auto m = random_matrix(16, 3, 1);
  const auto f = unitary_dft(m);
  EXPECT_EQ(f.domain(), Domain::beamspace);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < 16; ++k) {
      cplx acc = 0.0;
      for (std::size_t n = 0; n < 16; ++n) acc += m(n, c) * std::polar(1.0, -2.0 * std::numbers::pi * double(k * n) / 16.0);
      acc /= 4.0;
      EXPECT_NEAR(std::abs(f(k, c) - acc), 0.0, 1e-12);
    }
  }
}

TEST(UnitaryDft, RoundTripAndParseval) {
  for (std::size_t d : {1u, 2u, 8u, 128u, 1024u}) {
    const auto m = random_matrix(d, 4, d);
    const auto f = unitary_dft(m);
    EXPECT_NEAR(f.frobenius_sq(), m.frobenius_sq(), 1e-10 * m.frobenius_sq());
    const auto back = inverse_unitary_dft(f);
    EXPECT_EQ(back.domain(), Domain::antenna);
    EXPECT_LE(relative_diff(back, m), 1e-10);
  }
}

TEST(UnitaryDft, AllOnesConcentratesAtDc) {
  ChannelMatrix m(4, 1);
  for (cplx& v : m.data()) v = 1.0;
  const auto f = unitary_dft(m);
  EXPECT_NEAR(std::abs(f(0, 0) - cplx(2.0, 0.0)), 0.0, 1e-15);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(f(k, 0)), 0.0, 1e-15);
}

TEST(UnitaryDft, UnsupportedSizeThrows) { EXPECT_THROW(unitary_dft(ChannelMatrix(12, 2)), ParameterError); }

TEST(UnitaryDft, NoiseStaysWhite) {
  Rng rng(2);
  const auto n = ml_estimate(ChannelMatrix(1024, 1024), 1.0, rng);
  const auto f = unitary_dft(n);
  const double per_entry = f.frobenius_sq() / (1024.0 * 1024.0);
  EXPECT_NEAR(per_entry, 1.0, 0.01);
  double re = 0.0;
  for (const cplx& v : f.data()) re += v.real() * v.real();
  EXPECT_NEAR(re / (1024.0 * 1024.0), 0.5, 0.005);
  RealVector z(f.data().size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::norm(f.data()[i]);
  EXPECT_NEAR(sample_median(z), std::log(2.0), 0.01 * std::log(2.0));
}

TEST(MlEstimate, ZeroNoiseIsIdentity) {
  const auto h = random_matrix(32, 2, 3);
  Rng rng(3);
  const auto e = ml_estimate(h, 0.0, rng);
  for (std::size_t i = 0; i < h.data().size(); ++i) EXPECT_EQ(e.data()[i], h.data()[i]);
  EXPECT_THROW(ml_estimate(h, -1.0, rng), ParameterError);
}

TEST(MlEstimate, NoisePowerAndMedian) {
  Rng rng(4);
  const ChannelMatrix zero(1000, 1000);
  const auto e = ml_estimate(zero, 1.0, rng);
  const double pw = e.frobenius_sq() / 1e6;
  EXPECT_GE(pw, 0.995);
  EXPECT_LE(pw, 1.005);
  RealVector z(100000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::norm(e.data()[i]);
  const double m = sample_median(z);
  EXPECT_GE(m, std::log(2.0) * 0.99);
  EXPECT_LE(m, std::log(2.0) * 1.01);
}

TEST(SynthChannel, InheritsBcgStatistics) {
  Rng rng(5);
  const auto h = synth_sparse_channel(1 << 14, 8, 0.1, 2.0, rng);
  EXPECT_EQ(h.domain(), Domain::beamspace);
  std::size_t nz = 0;
  for (const cplx& v : h.data()) nz += v != cplx(0.0, 0.0);
  EXPECT_NEAR(double(nz) / double(h.data().size()), 0.1, 0.005);
  EXPECT_NEAR(h.frobenius_sq() / double(h.data().size()), 0.2, 0.2 * 0.02);
  Rng rng2(5);
  const auto zero = synth_sparse_channel(64, 2, 0.5, 0.0, rng2);
  EXPECT_EQ(zero.frobenius_sq(), 0.0);
  EXPECT_THROW(synth_sparse_channel(64, 2, 1.5, 1.0, rng2), ParameterError);
}

TEST(OneBit, Examples) {
  EXPECT_EQ(one_bit(cplx(3.0, -2.0)), cplx(1.0, -1.0));
  EXPECT_EQ(one_bit(cplx(-0.1, 5.0)), cplx(-1.0, 1.0));
  EXPECT_EQ(one_bit(cplx(0.0, -0.0)), cplx(1.0, 1.0));
  const auto q = one_bit_quantize(random_matrix(64, 4, 6));
  for (const cplx& v : q.entries.data()) EXPECT_EQ(std::norm(v), 2.0);
  EXPECT_EQ(q.effective_noise_power, 0.0);
  EXPECT_DOUBLE_EQ(one_bit_quantize(random_matrix(4, 1, 6), 1.0, 0.5).effective_noise_power,
                   effective_quant_noise_power(1.0, 0.5));
}

TEST(QuantNoise, ZeroSignal) {
  EXPECT_EQ(effective_quant_noise_power(0.0, 0.3), 2.0);
  EXPECT_EQ(effective_quant_noise_power(0.0, 7.0), 2.0);
  EXPECT_THROW(effective_quant_noise_power(0.0, 0.0), DomainError);
  EXPECT_THROW(effective_quant_noise_power(-1.0, 1.0), DomainError);
}

TEST(QuantNoise, MonteCarlo) {
  Rng rng(7);
  const double es = 1.0, n0 = 0.5;
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const cplx h = rng.complex_normal(es);
    acc += std::norm(one_bit(h + rng.complex_normal(n0)) - h);
  }
  const double q0 = effective_quant_noise_power(es, n0);
  EXPECT_NEAR(acc / n, q0, 0.01 * q0);
}

TEST(QuantNoise, FiniteOnGrid) {
  for (double es : {0.0, 1e-6, 0.1, 1.0, 10.0, 1e3}) {
    for (double n0 : {0.0, 1e-6, 0.1, 1.0, 10.0}) {
      if (es + n0 == 0.0) continue;
      const double q = effective_quant_noise_power(es, n0);
      EXPECT_TRUE(std::isfinite(q));
      EXPECT_NEAR(effective_quant_noise_power(es * (1 + 1e-9), n0), q, 1e-6 * (1.0 + q));
    }
  }
}

TEST(DenoiseChannel, KnownZeroNoiseIsIdentity) {
  const auto h = random_matrix(64, 3, 8);
  const auto res = denoise_channel_detailed(h, KnownNoise{0.0}, false);
  EXPECT_LE(relative_diff(res.estimate, h), 1e-12);
  for (double t : res.thresholds) EXPECT_EQ(t, 0.0);
  EXPECT_EQ(res.estimate.domain(), Domain::antenna);
}

TEST(DenoiseChannel, InputChecks) {
  EXPECT_THROW(denoise_channel(unitary_dft(random_matrix(8, 1, 9)), MedianBlind{}), ParameterError);
  EXPECT_THROW(denoise_channel(random_matrix(8, 1, 9), MedianBlind{}, true), DataError);
  EXPECT_THROW(denoise_channel(random_matrix(12, 1, 9), MedianBlind{}), ParameterError);
}

TEST(DenoiseChannel, ReducesErrorVersusMl) {
  double ml = 0.0, blind = 0.0, known = 0.0;
  for (int t = 0; t < 300; ++t) {
    const auto tr = channel_trial(10, std::uint64_t(t), 0.1, 1.0, 1.0);
    ml += channel_mse(tr.h_ml, tr.h);
    blind += channel_mse(denoise_channel(tr.h_ml, MedianBlind{}), tr.h);
    known += channel_mse(denoise_channel(tr.h_ml, KnownNoise{1.0}), tr.h);
  }
  EXPECT_LE(blind, 0.6 * ml);
  EXPECT_LE(std::abs(blind - known) / known, 0.05);
}

TEST(DenoiseChannel, OneBitBlindCloseToKnown) {
  for (double n0 : {10.0, 1.0, 0.1}) {
    double blind = 0.0, known = 0.0;
    for (int t = 0; t < 100; ++t) {
      Rng rng = Rng::derive(11, {std::uint64_t(n0 * 100), std::uint64_t(t)});
      const auto h = inverse_unitary_dft(synth_sparse_channel(128, 8, 0.1, 10.0, rng));
      const auto q = one_bit_quantize(ml_estimate(h, n0, rng), 1.0, n0);
      blind += channel_mse(denoise_channel(q.entries, MedianBlind{}, true), h);
      known += channel_mse(denoise_channel(q.entries, KnownNoise{q.effective_noise_power}, true), h);
    }
    EXPECT_LE(std::abs(blind - known) / known, 0.10) << "N0=" << n0;
  }
}

TEST(DenoiseChannel, OneBitNoiseFloorNearQ0) {
  // Below about -5 dB, Q0 also counts the undershoot (1 - G)^2 Es of the Bussgang gain G,
  // which the beamspace median sees as signal, so the check starts at -5 dB.
  for (double n0 : {3.1622776601683795, 1.0, 0.1, 0.01}) {
    double acc = 0.0;
    int count = 0;
    for (int t = 0; t < 50; ++t) {
      Rng rng = Rng::derive(12, {std::uint64_t(n0 * 100), std::uint64_t(t)});
      const auto h = inverse_unitary_dft(synth_sparse_channel(128, 8, 0.1, 10.0, rng));
      const auto beams = unitary_dft(one_bit_quantize(ml_estimate(h, n0, rng)).entries);
      for (std::size_t u = 0; u < beams.cols(); ++u, ++count) acc += estimate_noise_power(beams.column(u));
    }
    const double q0 = effective_quant_noise_power(1.0, n0);
    EXPECT_NEAR(acc / count, q0, 0.15 * q0) << "N0=" << n0;
  }
}

TEST(DenoiseChannel, NeverIncreasesSure) {
  const auto tr = channel_trial(13, 0, 0.1, 1.0, 1.0);
  const auto beams = unitary_dft(tr.h_ml);
  const auto res = denoise_channel_detailed(tr.h_ml, MedianBlind{}, false);
  for (std::size_t u = 0; u < beams.cols(); ++u) {
    const double n0 = res.noise_powers[u];
    EXPECT_LE(sure_soft_threshold(beams.column(u), res.thresholds[u], n0),
              sure_soft_threshold(beams.column(u), 0.0, n0) + 1e-12);
  }
}

TEST(ChannelMse, Examples) {
  const auto h = random_matrix(16, 4, 14);
  EXPECT_EQ(channel_mse(h, h), 0.0);
  auto g = h;
  g(3, 2) += cplx(3.0, 4.0);
  EXPECT_NEAR(channel_mse(g, h), 25.0 / 64.0, 1e-12);
  const auto k = random_matrix(16, 4, 15);
  double acc = 0.0;
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 4; ++c) acc += std::norm(k(r, c) - h(r, c));
  EXPECT_NEAR(channel_mse(k, h), acc / 64.0, 1e-12);
  EXPECT_THROW(channel_mse(h, ChannelMatrix(16, 3)), ParameterError);
}
