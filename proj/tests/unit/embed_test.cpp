#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "outsense/embed.hpp"
#include "outsense/error.hpp"

namespace outsense {
namespace {

TEST(GaussianSketch, ZeroVectorMapsToZero) {
  const auto phi = make_gaussian_sketch(4, 4, 7);
  EXPECT_TRUE(phi.apply(Matrix::Zero(4, 1)).isZero(0.0));
}

TEST(GaussianSketch, PreservesSquaredLengthInExpectation) {
  const auto phi = make_gaussian_sketch(200, 50, 1);
  double total = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vector v = oracle::gaussian_vector(50, 1000 + i);
    v.normalize();
    total += phi.apply(v).squaredNorm();
  }
  EXPECT_NEAR(total / 1000.0, 1.0, 0.05);
}

TEST(GaussianSketch, EntriesHaveVarianceOneOverRows) {
  const auto phi = make_gaussian_sketch(50, 400, 3);
  const Matrix d = phi.dense();
  EXPECT_DOUBLE_EQ(phi.scale(), 1.0 / std::sqrt(50.0));
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / static_cast<double>(d.size() - 1);
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(1.0 / 50.0 / d.size()));
  EXPECT_NEAR(var * 50.0, 1.0, 0.03);
}

TEST(GaussianSketch, SeededDeterminism) {
  EXPECT_TRUE(make_gaussian_sketch(30, 20, 9) == make_gaussian_sketch(30, 20, 9));
  EXPECT_FALSE(make_gaussian_sketch(30, 20, 9) == make_gaussian_sketch(30, 20, 10));
}

TEST(GaussianSketch, RejectsZeroDimensions) {
  EXPECT_THROW(make_gaussian_sketch(0, 3, 1), InvalidArgument);
  EXPECT_THROW(make_gaussian_sketch(3, 0, 1), InvalidArgument);
}

TEST(GaussianSketch, JlFailureFrequencyWithinBound) {
  // Lighter version of the acceptance suite: one (m, eps) point.
  const Index n = 64;
  const Index m = 100;
  const double eps = 0.5;
  const int vectors = 2000;
  int failures = 0;
  for (int i = 0; i < vectors; ++i) {
    const auto phi = make_gaussian_sketch(m, n, 500 + i);
    Vector v = oracle::gaussian_vector(n, 9000 + i);
    v.normalize();
    if (std::abs(phi.apply(v).squaredNorm() - 1.0) >= eps) ++failures;
  }
  const double bound = 2.0 * std::exp(-static_cast<double>(m) * jl_exponent(eps));
  const double freq = static_cast<double>(failures) / vectors;
  const double se = std::sqrt(std::max(bound * (1.0 - bound), 1e-12) / vectors);
  EXPECT_LE(freq, bound + 3.0 * se);
}

TEST(ColumnSampler, GammaOneSelectsEverything) {
  const auto s = make_column_sampler(10, 1.0, 123);
  EXPECT_EQ(s.cols(), 10);
  EXPECT_FALSE(s.degenerate());
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(s.indices()[i], i);
}

TEST(ColumnSampler, GammaZeroIsDegenerate) {
  const auto s = make_column_sampler(10, 0.0, 123);
  EXPECT_EQ(s.cols(), 0);
  EXPECT_TRUE(s.degenerate());
}

TEST(ColumnSampler, NeverExceedsBinomialTailAcrossSeeds) {
  int over = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    if (make_column_sampler(1000, 0.2, seed).cols() > 300) ++over;
  }
  EXPECT_EQ(over, 0);
}

TEST(ColumnSampler, CardinalityInsideTailBandAsOftenAsBoundAllows) {
  const Index n2 = 200;
  const double gamma = 0.1;
  const int draws = 2000;
  int violations = 0;
  for (int seed = 0; seed < draws; ++seed) {
    const auto c = static_cast<double>(make_column_sampler(n2, gamma, 77000 + seed).cols());
    if (c < gamma * n2 / 2.0 || c > 1.5 * gamma * n2) ++violations;
  }
  const double bound = std::exp(-3.0 * gamma * n2 / 28.0) + std::exp(-gamma * n2 / 8.0);
  const double se = std::sqrt(bound * (1.0 - bound) / draws);
  EXPECT_LE(static_cast<double>(violations) / draws, bound + 3.0 * se);
}

TEST(ColumnSampler, IndicesIncreasingAndApplySelectsColumns) {
  const auto s = make_column_sampler(40, 0.3, 5);
  for (std::size_t i = 1; i < s.indices().size(); ++i) {
    EXPECT_LT(s.indices()[i - 1], s.indices()[i]);
  }
  const Matrix x = oracle::gaussian_matrix(3, 40, 8);
  const Matrix picked = s.apply(x);
  ASSERT_EQ(picked.cols(), s.cols());
  for (Index j = 0; j < s.cols(); ++j) EXPECT_EQ(picked.col(j), x.col(s.indices()[j]));
  EXPECT_TRUE((x * s.dense()).isApprox(picked));
}

TEST(ColumnSampler, DecisionsDependOnlyOnIndex) {
  const auto a = make_column_sampler(50, 0.4, 21);
  const auto b = make_column_sampler(80, 0.4, 21);
  for (Index i : a.indices()) {
    EXPECT_TRUE(std::binary_search(b.indices().begin(), b.indices().end(), i));
  }
}

TEST(ColumnSampler, RejectsInvalidGamma) {
  EXPECT_THROW(make_column_sampler(10, -0.1, 1), InvalidArgument);
  EXPECT_THROW(make_column_sampler(10, 1.5, 1), InvalidArgument);
}

TEST(RowSubsampler, FullSelectionIsIdentity) {
  const auto s = make_row_subsampler(5, 5, 99);
  EXPECT_EQ(s.indices(), (IndexList{0, 1, 2, 3, 4}));
  EXPECT_TRUE(s.dense().isIdentity());
}

TEST(RowSubsampler, DistinctIndicesInRange) {
  const auto s = make_row_subsampler(100, 10, 3);
  ASSERT_EQ(s.indices().size(), 10u);
  const std::set<Index> unique(s.indices().begin(), s.indices().end());
  EXPECT_EQ(unique.size(), 10u);
  for (Index i : s.indices()) EXPECT_LT(i, 100);
  const Matrix d = s.dense();
  EXPECT_TRUE((d.rowwise().sum().array() == 1.0).all());
  EXPECT_TRUE(((d.array() == 0.0) || (d.array() == 1.0)).all());
}

TEST(RowSubsampler, SeededDeterminismAndUniformity) {
  EXPECT_EQ(make_row_subsampler(100, 10, 3).indices(), make_row_subsampler(100, 10, 3).indices());
  std::vector<int> hits(20, 0);
  const int draws = 4000;
  for (int seed = 0; seed < draws; ++seed) {
    const auto op = make_row_subsampler(20, 5, 1000 + seed);
    for (Index i : op.indices()) ++hits[i];
  }
  // Each row is picked with probability 1/4.
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(draws), 0.25, 0.03);
}

TEST(RowSubsampler, RejectsTooManyRows) {
  EXPECT_THROW(make_row_subsampler(5, 6, 1), InvalidArgument);
  EXPECT_THROW(make_row_subsampler(5, 0, 1), InvalidArgument);
}

TEST(ProbeVector, ContinuousDraws) {
  const auto one = make_probe_vector(1, 0);
  EXPECT_EQ(one.rows(), 1);
  EXPECT_NE(one.dense()(0, 0), 0.0);
  const auto phi = make_probe_vector(6, 4);
  EXPECT_TRUE(phi.apply(Matrix::Zero(6, 1)).isZero(0.0));
  EXPECT_NE(make_probe_vector(6, 4).dense(), make_probe_vector(6, 5).dense());
}

TEST(SketchRecord, RoundTripsEveryKind) {
  for (const auto& op : {make_gaussian_sketch(7, 5, 11), make_column_sampler(30, 0.25, 12),
                         make_row_subsampler(9, 4, 13), make_probe_vector(8, 14)}) {
    const auto back = SketchOperator::from_record(op.to_record());
    EXPECT_TRUE(back == op) << op.to_record();
  }
  EXPECT_EQ(make_gaussian_sketch(2, 3, 4).to_record().rfind("dense-gaussian,2,3,4,", 0), 0u);
}

TEST(SketchRecord, RejectsMalformedInput) {
  EXPECT_THROW(SketchOperator::from_record("dense-gaussian,2,3"), InvalidArgument);
  EXPECT_THROW(SketchOperator::from_record("cubic,2,3,4,1"), InvalidArgument);
  EXPECT_THROW(SketchOperator::from_record("dense-gaussian,2,x,4,1"), InvalidArgument);
}

// ---- budgets -------------------------------------------------------------

double f_quarter() { return 0.25 * 0.25 / 4.0 - 0.25 * 0.25 * 0.25 / 6.0; }

TEST(Budget, JlExponentAtQuarterIsFiveOver384) {
  EXPECT_NEAR(jl_exponent(0.25), 5.0 / 384.0, 1e-16);
  EXPECT_NEAR(jl_exponent(kBudgetDistortion), 0.013020833333333334, 1e-17);
  for (double e : {0.1, 0.3, 0.5, 0.9}) EXPECT_GT(jl_exponent(e), 0.0);
}

TEST(Budget, RowBudgetExamples) {
  SampleBudget b;
  b.rank = 1;
  b.outliers = 1;
  b.delta = 1.0;
  // (10 + ln 2) / (5/384)
  EXPECT_EQ(min_row_budget(b).value, 822);
  b.rank = 5;
  b.outliers = 10;
  b.delta = 0.1;
  EXPECT_EQ(min_row_budget(b).value, 2711);
  EXPECT_FALSE(min_row_budget(b).degenerate);
}

TEST(Budget, RowBudgetZeroOutliersIsDegenerate) {
  SampleBudget b;
  b.rank = 5;
  b.outliers = 0;
  b.delta = 0.1;
  const auto out = min_row_budget(b);
  EXPECT_TRUE(out.degenerate);
  EXPECT_EQ(out.value, static_cast<Index>(std::ceil((30.0 + std::log(20.0)) / f_quarter())));
}

TEST(Budget, RowBudgetMonotone) {
  SampleBudget b;
  b.delta = 0.1;
  Index prev = 0;
  for (Index r = 1; r <= 20; ++r) {
    b.rank = r;
    const Index v = min_row_budget(b).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  b.rank = 3;
  prev = 0;
  for (Index k = 1; k <= 1000; k *= 3) {
    b.outliers = k;
    EXPECT_GE(min_row_budget(b).value, prev);
    prev = min_row_budget(b).value;
  }
  b.outliers = 5;
  b.delta = 0.5;
  const Index loose = min_row_budget(b).value;
  b.delta = 0.01;
  EXPECT_GT(min_row_budget(b).value, loose);
}

TEST(Budget, ColumnBudgetExamples) {
  SampleBudget b;
  b.outliers = 10;
  b.n2 = 1000;
  b.delta = 0.1;
  // (110 + 20 ln 100 + ln 20) / (5/384) = 15751.6...
  EXPECT_EQ(min_col_budget(b), 15752);
  b.outliers = 0;
  EXPECT_THROW(min_col_budget(b), InvalidArgument);
}

TEST(Budget, ColumnBudgetMonotoneInK) {
  SampleBudget b;
  b.n2 = 10000;
  b.delta = 0.1;
  Index prev = 0;
  for (Index k = 1; static_cast<double>(k) * std::exp(1.0) <= 10000.0; k += 7) {
    b.outliers = k;
    const Index v = min_col_budget(b);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Budget, FormulasMatchClosedFormsOnRandomGrid) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<Index> small(1, 40);
  std::uniform_int_distribution<Index> big(100, 100000);
  std::uniform_real_distribution<double> unit(0.001, 1.0);
  std::uniform_real_distribution<double> mu(1.0, 20.0);
  const double f = 5.0 / 384.0;
  for (int t = 0; t < 500; ++t) {
    SampleBudget b;
    b.rank = small(gen);
    b.n2 = big(gen);
    b.outliers = std::min<Index>(small(gen) * 3, b.n2);
    b.n_low_rank = std::max<Index>(1, b.n2 - b.outliers);
    b.n1 = big(gen);
    b.delta = unit(gen);
    b.incoherence = mu(gen);
    const double r = static_cast<double>(b.rank), k = static_cast<double>(b.outliers);
    const double n2 = static_cast<double>(b.n2), nl = static_cast<double>(b.n_low_rank);
    const double d = b.delta, m = b.incoherence;

    EXPECT_EQ(min_row_budget(b).value,
              static_cast<Index>(std::ceil((5 * (r + 1) + std::log(k) + std::log(2 / d)) / f)));
    EXPECT_EQ(min_col_budget(b),
              static_cast<Index>(std::ceil((11 * k + 2 * k * std::log(n2 / k) + std::log(2 / d)) / f)));
    const double g = std::max({0.05, 200 * std::log(5 / d) / nl, 24 * std::log(10 / d) / n2,
                               10 * r * m * std::log(5 * r / d) / nl});
    EXPECT_DOUBLE_EQ(min_gamma(b).value, g);
    EXPECT_EQ(min_gamma(b).infeasible, g > 1.0);
    EXPECT_EQ(max_outliers(b), static_cast<Index>(std::floor(n2 / (40 * (1 + 121 * r * m)))));
  }
}

TEST(Budget, GammaExamples) {
  SampleBudget b;
  b.rank = 1;
  b.incoherence = 1.0;
  b.n_low_rank = 1000000;
  b.n2 = 1000000;
  b.delta = 0.1;
  EXPECT_DOUBLE_EQ(min_gamma(b).value, 0.05);
  EXPECT_FALSE(min_gamma(b).infeasible);

  b.rank = 100;
  b.incoherence = 5.0;
  b.n_low_rank = 10000;
  b.n2 = 10000;
  const auto out = min_gamma(b);
  EXPECT_NEAR(out.value, 10.0 * 100 * 5 * std::log(5000.0) / 1e4, 1e-12);
  EXPECT_NEAR(out.value, 4.2586, 1e-4);
  EXPECT_TRUE(out.infeasible);

  b.rank = 1;
  b.incoherence = 1.0;
  b.n_low_rank = b.n2 = Index{1} << 40;
  EXPECT_DOUBLE_EQ(min_gamma(b).value, 0.05);
}

TEST(Budget, MaxOutliersExamples) {
  SampleBudget b;
  b.rank = 1;
  b.incoherence = 1.0;
  b.n2 = 4880;
  EXPECT_EQ(max_outliers(b), 1);
  b.n2 = 1000;
  EXPECT_EQ(max_outliers(b), 0);
  b.n2 = 1000000;
  Index prev = max_outliers(b);
  for (double rm = 1.5; rm < 50.0; rm *= 1.5) {
    b.incoherence = rm;
    EXPECT_LE(max_outliers(b), prev);
    prev = max_outliers(b);
  }
}

TEST(Budget, RejectsBadDelta) {
  SampleBudget b;
  b.delta = 0.0;
  EXPECT_THROW(min_row_budget(b), InvalidArgument);
  b.delta = 1.5;
  EXPECT_THROW(min_row_budget(b), InvalidArgument);
}

}  // namespace
}  // namespace outsense
