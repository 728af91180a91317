#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "blindest/robust_stats.hpp"
#include "test_support.hpp"

using namespace blindest;

TEST(SampleMedian, OddLength) {
  const RealVector z{1.0, 2.0, 3.0};
  EXPECT_EQ(sample_median(z), 2.0);
}

TEST(SampleMedian, EvenLengthAveragesCentralPair) {
  const RealVector z{4.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(sample_median(z), 2.5);
}

TEST(SampleMedian, SingleEntryAndTies) {
  EXPECT_EQ(sample_median(RealVector{7.0}), 7.0);
  EXPECT_EQ(sample_median(RealVector{2.0, 2.0, 2.0, 2.0}), 2.0);
  EXPECT_EQ(sample_median(RealVector{0.0, 5.0, 0.0, 5.0, 0.0}), 0.0);
}

TEST(SampleMedian, ExponentialSamples) {
  Rng rng(21);
  RealVector z(100000);
  for (double& v : z) v = -std::log(rng.uniform_pos());
  EXPECT_NEAR(sample_median(z), std::log(2.0), 0.01);
}

TEST(SampleMedian, DoesNotModifyInput) {
  const RealVector z{5.0, 3.0, 9.0, 1.0, 7.0, 2.0};
  const RealVector copy = z;
  (void)sample_median(z);
  EXPECT_EQ(z, copy);
}

TEST(SampleMedian, Errors) {
  EXPECT_THROW(sample_median(RealVector{}), DegenerateInputError);
  EXPECT_THROW(sample_median(RealVector{1.0, NAN, 2.0}), DataError);
}

TEST(SampleMedian, MatchesSortOnRandomVectors) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> len(1, 300);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int trial = 0; trial < 10000; ++trial) {
    RealVector z(static_cast<std::size_t>(len(gen)));
    const int k = kind(gen);
    for (double& v : z) {
      if (k == 0) {
        v = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
      } else if (k == 1) {
        v = std::exponential_distribution<double>(1.0)(gen);
      } else {
        v = static_cast<double>(std::uniform_int_distribution<int>(0, 4)(gen));  // heavy ties
      }
    }
    ASSERT_EQ(sample_median(z), test::sorted_median(z)) << "trial " << trial;
  }
}

TEST(SampleMedian, PermutationInvariantAndScaleEquivariant) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    RealVector z(static_cast<std::size_t>(1 + trial));
    for (double& v : z) v = std::exponential_distribution<double>(0.5)(gen);
    const double m = sample_median(z);
    RealVector shuffled = z;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    EXPECT_EQ(sample_median(shuffled), m);
    RealVector scaled = z;
    for (double& v : scaled) v *= 4.0;  // power of two: exact in floating point
    EXPECT_EQ(sample_median(scaled), 4.0 * m);
    for (double& v : scaled) v = 0.0;
    EXPECT_EQ(sample_median(scaled), 0.0);
  }
}

TEST(AbsSquared, Examples) {
  EXPECT_EQ(abs_squared(ComplexVector{{3.0, 4.0}}), RealVector{25.0});
  EXPECT_EQ(abs_squared(ComplexVector(3)), RealVector(3, 0.0));
  EXPECT_EQ(abs_squared(ComplexVector{{1.0, 0.0}, {0.0, 1.0}}), (RealVector{1.0, 1.0}));
}

TEST(LqNorm, Examples) {
  EXPECT_DOUBLE_EQ(lq_norm(ComplexVector{{3.0, 4.0}}, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(lq_norm(ComplexVector{{1.0, 0.0}, {0.0, -2.0}}, kInfNorm), 2.0);
  EXPECT_DOUBLE_EQ(lq_norm(ComplexVector{{1.0, 0.0}, {1.0, 0.0}}, 1.0), 2.0);
}

TEST(LqNorm, GeneralExponentMatchesDefinition) {
  const ComplexVector y{{1.0, 1.0}, {0.0, 2.0}, {-3.0, 0.5}};
  double acc = 0.0;
  for (const cplx& v : y) acc += std::pow(std::hypot(v.real(), v.imag()), 3.0);
  EXPECT_NEAR(lq_norm(y, 3.0), std::cbrt(acc), 1e-12);
  double acc4 = 0.0;
  for (const cplx& v : y) acc4 += std::pow(std::hypot(v.real(), v.imag()), 4.0);
  EXPECT_NEAR(lq_norm(y, 4.0), std::pow(acc4, 0.25), 1e-12);
  EXPECT_THROW(lq_norm(y, 0.5), ParameterError);
}

TEST(LqNorm, Ordering) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    ComplexVector y(static_cast<std::size_t>(1 + trial % 97));
    for (auto& v : y) v = rng.complex_normal(1.0 + trial % 5);
    const double ninf = lq_norm(y, kInfNorm), n4 = lq_norm(y, 4.0), n2 = lq_norm(y, 2.0), n1 = lq_norm(y, 1.0);
    EXPECT_LE(ninf, n4 * (1 + 1e-12));
    EXPECT_LE(n4, n2 * (1 + 1e-12));
    EXPECT_LE(n2, n1 * (1 + 1e-12));
  }
}
