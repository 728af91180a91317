#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "blindest/robust_stats.hpp"
#include "blindest/signal_model.hpp"
#include "test_support.hpp"

using namespace blindest;

TEST(SampleBcg, FullActivityPowerMatchesVariance) {
  Rng rng(11);
  const auto s = sample_bcg(BcgParams{1000000, 1.0, 2.0, 1.0}, rng);
  const double p = mean_power(s);
  EXPECT_GE(p, 1.99);
  EXPECT_LE(p, 2.01);
}

TEST(SampleBcg, ZeroVarianceGivesZeros) {
  for (double p : {0.05, 0.5, 1.0}) {
    Rng rng(3);
    for (const cplx& v : sample_bcg(BcgParams{1000, p, 0.0, 1.0}, rng)) EXPECT_EQ(v, cplx(0.0, 0.0));
  }
}

TEST(SampleBcg, NonzeroFractionConcentrates) {
  Rng rng(12);
  const auto s = sample_bcg(BcgParams{100000, 0.1, 1.0, 1.0}, rng);
  const auto nz = std::count_if(s.begin(), s.end(), [](cplx v) { return v != cplx(0.0, 0.0); });
  const double frac = static_cast<double>(nz) / 1e5;
  EXPECT_GE(frac, 0.095);
  EXPECT_LE(frac, 0.105);
}

TEST(SampleBcg, InvalidParametersThrow) {
  Rng rng(1);
  EXPECT_THROW(sample_bcg(BcgParams{0, 0.1, 1.0, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_bcg(BcgParams{8, 0.0, 1.0, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_bcg(BcgParams{8, 1.5, 1.0, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_bcg(BcgParams{8, 0.1, -1.0, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_bcg(BcgParams{8, 0.1, NAN, 1.0}, rng), ParameterError);
}

TEST(SampleBcg, SameSeedIsBitIdentical) {
  const BcgParams params = BcgParams::from_snr(4096, 0.2, 3.0);
  Rng a = Rng::derive(99, {4, 7});
  Rng b = Rng::derive(99, {4, 7});
  const auto ta = sample_trial(params, a);
  const auto tb = sample_trial(params, b);
  ASSERT_EQ(ta.y.size(), tb.y.size());
  EXPECT_EQ(0, std::memcmp(ta.y.data(), tb.y.data(), ta.y.size() * sizeof(cplx)));
  Rng c = Rng::derive(99, {4, 8});
  EXPECT_NE(sample_trial(params, c).y, ta.y);
}

TEST(BcgParams, FromSnrSetsNonzeroVariance) {
  const auto p = BcgParams::from_snr(64, 0.1, 10.0, 2.0);
  EXPECT_DOUBLE_EQ(p.nonzero_variance, 200.0);
  EXPECT_DOUBLE_EQ(p.signal_power(), 20.0);
  EXPECT_DOUBLE_EQ(p.snr(), 10.0);
}

TEST(AddNoise, ZeroNoiseIsIdentity) {
  Rng rng(5);
  auto s = sample_bcg(BcgParams{512, 0.3, 4.0, 1.0}, rng);
  const auto copy = s;
  const auto t = add_noise(std::move(s), 0.0, rng);
  EXPECT_EQ(t.y, copy);
  EXPECT_EQ(t.s, copy);
}

TEST(AddNoise, NoisePowerConcentrates) {
  Rng rng(6);
  const auto t = add_noise(ComplexVector(1000000), 1.0, rng);
  const double p = mean_power(t.y);
  EXPECT_GE(p, 0.995);
  EXPECT_LE(p, 1.005);
}

TEST(AddNoise, NoisePowerMedianIsLog2) {
  Rng rng(7);
  const auto t = add_noise(ComplexVector(100000), 1.0, rng);
  const double m = sample_median(abs_squared(t.n));
  EXPECT_GE(m, std::log(2.0) * 0.99);
  EXPECT_LE(m, std::log(2.0) * 1.01);
}

TEST(AddNoise, ObservationIsExactSum) {
  Rng rng(8);
  const auto t = sample_trial(BcgParams::from_snr(1000, 0.2, 1.0), rng);
  for (std::size_t d = 0; d < t.y.size(); ++d) EXPECT_EQ(t.y[d], t.s[d] + t.n[d]);
}

TEST(AddNoise, NegativeNoiseThrows) {
  Rng rng(1);
  EXPECT_THROW(add_noise(ComplexVector(4), -1.0, rng), ParameterError);
}

TEST(AddNoise, CircularSymmetry) {
  Rng rng(9);
  const auto t = add_noise(ComplexVector(1000000), 3.0, rng);
  double re = 0.0, im = 0.0, cross = 0.0;
  for (const cplx& v : t.n) {
    re += v.real() * v.real();
    im += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  re /= 1e6;
  im /= 1e6;
  cross /= 1e6;
  EXPECT_NEAR(re, 1.5, 0.02 * 1.5);
  EXPECT_NEAR(im, 1.5, 0.02 * 1.5);
  EXPECT_NEAR(cross, 0.0, 0.02);
}

TEST(SampleTrial, PowerOfObservation) {
  Rng rng(10);
  const auto params = BcgParams::from_snr(1000000, 0.1, 2.0, 1.5);
  const auto t = sample_trial(params, rng);
  const double expected = params.signal_power() + params.noise_variance;
  EXPECT_NEAR(mean_power(t.y), expected, 0.01 * expected);
}

TEST(GenieStats, ZeroSignal) {
  Rng rng(2);
  const auto t = add_noise(ComplexVector(100), 1.0, rng);
  const auto g = genie_stats(t);
  EXPECT_EQ(g.signal_power, 0.0);
  EXPECT_EQ(g.snr, 0.0);
  EXPECT_FALSE(g.snr_infinite);
}

TEST(GenieStats, UnitModulusNoise) {
  TrialSample t;
  t.s = ComplexVector(4);
  t.n = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  t.y = t.n;
  EXPECT_EQ(genie_stats(t).noise_power, 1.0);
}

TEST(GenieStats, RatioConsistency) {
  Rng rng(4);
  const auto t = sample_trial(BcgParams::from_snr(256, 0.3, 2.0), rng);
  const auto g = genie_stats(t);
  EXPECT_DOUBLE_EQ(g.snr, g.signal_power / g.noise_power);
  EXPECT_DOUBLE_EQ(g.noise_power, test::squared_error(t.n, ComplexVector(256)));
}

TEST(GenieStats, NoiselessFlagsInfiniteSnr) {
  TrialSample t;
  t.s = {cplx(1, 0)};
  t.n = {cplx(0, 0)};
  t.y = t.s;
  const auto g = genie_stats(t);
  EXPECT_TRUE(g.snr_infinite);
  EXPECT_TRUE(std::isinf(g.snr));
}
