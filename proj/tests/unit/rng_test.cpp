#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "outsense/rng.hpp"

namespace outsense {
namespace {

// Reference SplitMix64 written from the published algorithm.
std::uint64_t reference_splitmix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TEST(CounterRng, MatchesPublishedSplitMixVectors) {
  CounterRng rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next(), 0x06C45D188009454FULL);
}

TEST(CounterRng, MatchesReferenceForArbitrarySeeds) {
  for (std::uint64_t seed : {1ULL, 42ULL, 0xDEADBEEFULL, ~0ULL}) {
    CounterRng rng(seed);
    std::uint64_t state = seed;
    for (int i = 0; i < 100; ++i) ASSERT_EQ(rng.next(), reference_splitmix(state));
  }
}

TEST(CounterRng, UniformAtIndexesTheStream) {
  CounterRng rng(99);
  for (std::uint64_t i = 0; i < 50; ++i) {
    EXPECT_EQ(rng.uniform(), CounterRng::uniform_at(99, i));
  }
}

TEST(CounterRng, UniformIsInUnitIntervalWithCorrectMoments) {
  CounterRng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(CounterRng, NormalHasUnitVarianceAndZeroMean) {
  CounterRng rng(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, fourth = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sq += z * z;
    fourth += z * z * z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.015);
  EXPECT_NEAR(fourth / n, 3.0, 0.1);
}

TEST(CounterRng, NormalPairsUseCachedSine) {
  // Two normals consume exactly two 64-bit words.
  CounterRng a(17);
  a.normal();
  a.normal();
  CounterRng b(17);
  b.next();
  b.next();
  EXPECT_EQ(a.next(), b.next());
}

TEST(CounterRng, BelowStaysInRangeAndCoversIt) {
  CounterRng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);
}

TEST(DeriveSeed, DeterministicAndSensitiveToEveryCounter) {
  EXPECT_EQ(derive_seed(7, {1, 2, 3}), derive_seed(7, {1, 2, 3}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 10; ++a)
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(derive_seed(7, {a, b}));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(DeriveSeed, XorsTheMasterSeed) {
  const std::uint64_t h = derive_seed(0, {4, 5});
  EXPECT_EQ(derive_seed(12345, {4, 5}), 12345ULL ^ h);
}

TEST(Mix64, IsBijectiveOnSample) {
  std::set<std::uint64_t> out;
  for (std::uint64_t i = 0; i < 10000; ++i) out.insert(mix64(i));
  EXPECT_EQ(out.size(), 10000u);
}

}  // namespace
}  // namespace outsense
