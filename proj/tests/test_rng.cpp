#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "softclip/error.hpp"
#include "softclip/rng.hpp"

using namespace softclip;

TEST(Rng, EngineMatchesStandardSequence) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42, "env", 3);
  Rng b(42, "env", 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DerivedSeedsDifferAcrossStreamsAndIndices) {
  std::set<std::uint64_t> seen;
  for (const char* name : {"maze", "init", "env", "eval"}) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      for (std::uint64_t j = 0; j < 3; ++j) seen.insert(derive_seed(7, name, i, j));
    }
  }
  EXPECT_EQ(seen.size(), 4u * 10u * 3u);
  EXPECT_NE(derive_seed(1, "env"), derive_seed(2, "env"));
}

TEST(Rng, UniformInUnitIntervalWithCorrectMean) {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Standard error of the mean is sqrt(1/12 / n) ~ 6.5e-4.
  EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 500.0);
  EXPECT_THROW(rng.below(0), InvalidArgument);
}

TEST(Rng, CategoricalFollowsWeightsAndSkipsZeros) {
  Rng rng(3);
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(w)];
  EXPECT_EQ(counts[0], 0);
  EXPECT_EQ(counts[2], 0);
  EXPECT_NEAR(counts[3] / static_cast<double>(n), 0.75, 0.01);
  EXPECT_THROW(rng.categorical(std::vector<double>{0.0, 0.0}), InvalidArgument);
}

TEST(Rng, BernoulliFrequency) {
  Rng rng(4);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.2);
  EXPECT_NEAR(hits / static_cast<double>(n), 0.2, 0.01);
}
