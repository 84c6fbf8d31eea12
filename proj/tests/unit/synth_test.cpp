#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "outsense/error.hpp"
#include "outsense/synth.hpp"

namespace outsense {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(GenerateInstance, NoOutliers) {
  const auto inst = generate_instance(20, 50, 3, 0, 1);
  EXPECT_TRUE(inst.outliers.isZero(0.0));
  EXPECT_TRUE(inst.support.empty());
  EXPECT_EQ(inst.observed, inst.low_rank);
}

TEST(GenerateInstance, LayoutAndSupport) {
  const auto inst = generate_instance(30, 100, 2, 7, 2);
  EXPECT_EQ(inst.support, (IndexList{93, 94, 95, 96, 97, 98, 99}));
  EXPECT_TRUE(inst.low_rank.rightCols(7).isZero(0.0));
  EXPECT_TRUE(inst.outliers.leftCols(93).isZero(0.0));
  EXPECT_EQ(inst.observed, inst.low_rank + inst.outliers);
  EXPECT_EQ(inst.rank, 2);
}

TEST(GenerateInstance, EqualEnergyAcrossBlocks) {
  double low = 0.0, out = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto inst = generate_instance(100, 1000, 5, 10, s);
    low += inst.observed.leftCols(990).colwise().squaredNorm().mean();
    out += inst.observed.rightCols(10).colwise().squaredNorm().mean();
  }
  low /= 50.0;
  out /= 50.0;
  EXPECT_NEAR(low / 500.0, 1.0, 0.1);
  EXPECT_NEAR(out / 500.0, 1.0, 0.1);
  EXPECT_LE(std::abs(low - out) / 500.0, 0.1);
}

TEST(GenerateInstance, LowRankPartHasExactRank) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Index r = 1 + static_cast<Index>(s % 5);
    const auto inst = generate_instance(30, 60, r, 5, s);
    const Vector sv = oracle::singular_values(inst.low_rank);
    const double tol = 60.0 * std::numeric_limits<double>::epsilon() * sv(0);
    EXPECT_EQ((sv.array() > tol).count(), r) << "seed " << s;
  }
}

TEST(GenerateInstance, DeterministicAndSeedSensitive) {
  const auto a = generate_instance(15, 40, 2, 3, 9);
  const auto b = generate_instance(15, 40, 2, 3, 9);
  const auto c = generate_instance(15, 40, 2, 3, 10);
  EXPECT_EQ(a.observed, b.observed);
  EXPECT_NE(a.observed, c.observed);
}

TEST(GenerateInstance, NormalizedColumnsHaveUnitNorm) {
  const auto inst = generate_instance(20, 60, 2, 5, 4, true);
  EXPECT_TRUE(inst.normalized);
  for (Index j = 0; j < 60; ++j) EXPECT_NEAR(inst.observed.col(j).norm(), 1.0, 1e-12);
  EXPECT_EQ(inst.observed, inst.low_rank + inst.outliers);
}

TEST(GenerateInstance, RejectsBadShapes) {
  EXPECT_THROW(generate_instance(10, 20, 16, 5, 0), InvalidArgument);
  EXPECT_THROW(generate_instance(10, 20, 0, 5, 0), InvalidArgument);
  EXPECT_THROW(generate_instance(10, 20, 1, 20, 0), InvalidArgument);
  EXPECT_THROW(generate_instance(5, 20, 6, 2, 0), InvalidArgument);
}

TEST(AddNoise, ZeroSigmaLeavesMatrixAlone) {
  const auto inst = generate_instance(10, 30, 1, 2, 3);
  const auto noisy = add_noise(inst, 0.0, 4);
  EXPECT_EQ(noisy.observed, inst.observed);
}

TEST(AddNoise, VarianceMatchesSigma) {
  const auto inst = generate_instance(100, 1000, 3, 10, 5);
  const auto noisy = add_noise(inst, 1e-3, 6);
  const Matrix n = noisy.observed - inst.low_rank - inst.outliers;
  const double mean = n.mean();
  const double var = (n.array() - mean).square().sum() / static_cast<double>(n.size() - 1);
  EXPECT_NEAR(var / 1e-6, 1.0, 0.05);
  EXPECT_EQ(noisy.low_rank, inst.low_rank);
  EXPECT_EQ(noisy.noise_sigma, 1e-3);
  EXPECT_EQ(add_noise(inst, 1e-3, 6).observed, noisy.observed);
  EXPECT_THROW(add_noise(inst, -1.0, 6), InvalidArgument);
}

TEST(BernoulliMask, DensityAndEdgeCases) {
  const Mask m = bernoulli_mask(100, 1000, 0.3, 7);
  EXPECT_NEAR(static_cast<double>(m.count()) / 1e5, 0.3, 0.01);
  EXPECT_TRUE(bernoulli_mask(20, 30, 1.0, 7).all());
  EXPECT_TRUE((bernoulli_mask(20, 30, 0.5, 8) == bernoulli_mask(20, 30, 0.5, 8)).all());
  EXPECT_THROW(bernoulli_mask(5, 5, 0.0, 1), InvalidArgument);
  EXPECT_THROW(bernoulli_mask(5, 5, 1.5, 1), InvalidArgument);
}

TEST(PermuteColumns, MovesColumnsAndSupport) {
  const auto inst = generate_instance(8, 10, 1, 2, 11);
  IndexList perm{9, 0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto p = permute_columns(inst, perm);
  for (Index j = 0; j < 10; ++j) {
    EXPECT_EQ(p.observed.col(j), inst.observed.col(perm[j]));
    EXPECT_EQ(p.outliers.col(j), inst.outliers.col(perm[j]));
  }
  EXPECT_EQ(p.support, (IndexList{0, 9}));
  EXPECT_THROW(permute_columns(inst, IndexList{0, 1}), InvalidArgument);
  EXPECT_THROW(permute_columns(inst, IndexList(10, 0)), InvalidArgument);
}

TEST(OracleSuccess, Examples) {
  EXPECT_TRUE(oracle_success({vec({5, 4, 0.1})}, {0, 1}));
  EXPECT_FALSE(oracle_success({vec({5, 0.1, 4})}, {0, 1}));
  EXPECT_FALSE(oracle_success({vec({0.1, 0.2})}, {}));
  EXPECT_TRUE(oracle_success({vec({0.0, 0.0})}, {}));
  // One good score vector on the path is enough.
  EXPECT_TRUE(oracle_success({vec({5, 0.1, 4}), vec({5, 4, 0.1})}, {0, 1}));
}

TEST(OracleSuccess, TiesAreFailures) {
  EXPECT_FALSE(oracle_success({vec({1.0, 1.0, 0.5})}, {0}));
  EXPECT_TRUE(oracle_success({vec({1.0, 1.0, 0.5})}, {0, 1}));
}

TEST(OracleSuccess, AgreesWithBruteForceThresholdScan) {
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int> coin(0, 3);
  std::exponential_distribution<double> dist(1.0);
  for (int t = 0; t < 500; ++t) {
    const Index n = 5 + t % 20;
    IndexList support;
    for (Index j = 0; j < n; ++j) if (coin(gen) == 0) support.push_back(j);
    std::vector<Vector> path;
    for (int q = 0; q < 1 + t % 3; ++q) {
      Vector s(n);
      for (Index j = 0; j < n; ++j) {
        const bool in = std::binary_search(support.begin(), support.end(), j);
        s(j) = coin(gen) == 0 ? 0.0 : dist(gen) * (in ? 4.0 : 1.0);
      }
      path.push_back(s);
    }
    bool want = false;
    for (const auto& s : path) want = want || oracle::brute_force_success(s, support);
    EXPECT_EQ(oracle_success(path, support), want) << "trial " << t;
  }
}

TEST(ColumnIncoherence, Bounds) {
  Matrix e = Matrix::Zero(5, 4);
  e(0, 0) = 1.0;  // rank one supported on a single column: mu = n_L / r = 1
  EXPECT_NEAR(column_incoherence(e), 1.0, 1e-12);
  const Matrix flat = Vector::Ones(5) * RowVector::Ones(8);
  EXPECT_NEAR(column_incoherence(flat), 1.0, 1e-12);
  Matrix spike = Matrix::Zero(6, 6);
  spike(0, 0) = 1.0;
  spike(1, 1) = 1.0;
  spike(2, 2) = 1.0;
  // Three nonzero columns, rank 3: every column is coherent, mu = 1.
  EXPECT_NEAR(column_incoherence(spike), 1.0, 1e-12);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = generate_instance(20, 80, 3, 4, s);
    const double mu = column_incoherence(inst.low_rank);
    EXPECT_GE(mu, 1.0 - 1e-12);
    EXPECT_LE(mu, 76.0 / 3.0 + 1e-9);
  }
}

TEST(Hypergeometric, BoundValues) {
  EXPECT_EQ(hypergeometric_tail_bound(1000, 100, 50, 0.0), 1.0);
  EXPECT_NEAR(hypergeometric_tail_bound(1000, 100, 50, 1.0), std::exp(-1.875), 1e-15);
  EXPECT_NEAR(hypergeometric_tail_bound(1000, 100, 50, 1.0), 0.15335, 5e-6);
}

TEST(Hypergeometric, SamplerMomentsAndTail) {
  CounterRng rng(17);
  const int draws = 100000;
  int tail = 0;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Index h = sample_hypergeometric(1000, 100, 50, rng);
    ASSERT_GE(h, 0);
    ASSERT_LE(h, 50);
    sum += static_cast<double>(h);
    tail += h >= 10;
  }
  EXPECT_NEAR(sum / draws, 5.0, 0.03);
  const double p = static_cast<double>(tail) / draws;
  EXPECT_LE(p, hypergeometric_tail_bound(1000, 100, 50, 1.0));
  EXPECT_GT(p, 0.0);
}

TEST(Hypergeometric, SamplerEdgeCases) {
  CounterRng rng(1);
  EXPECT_EQ(sample_hypergeometric(10, 0, 5, rng), 0);
  EXPECT_EQ(sample_hypergeometric(10, 10, 5, rng), 5);
  EXPECT_EQ(sample_hypergeometric(10, 4, 10, rng), 4);
}

}  // namespace
}  // namespace outsense
