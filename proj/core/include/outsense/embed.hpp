#pragma once

// Random measurement operators and sampling-budget validators.

#include <cstdint>
#include <string>
#include <string_view>

#include "outsense/types.hpp"

namespace outsense {

enum class SketchKind {
  kDenseGaussian,
  kRowSubsample,
  kColumnBernoulli,
  kSingleRow,
};

std::string_view to_string(SketchKind kind);

// An immutable, seeded measurement operator.
//
// Dense and single-row operators carry their entries. Selectors carry a
// sorted index list:
//   kRowSubsample    rows() = m selected rows out of cols() = n1
//   kColumnBernoulli rows() = n2 columns considered, cols() = |S| selected;
//                    scale() holds the Bernoulli parameter gamma
class SketchOperator {
 public:
  SketchKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::uint64_t seed() const { return seed_; }
  double scale() const { return scale_; }

  // True for an empty column selection.
  bool degenerate() const { return degenerate_; }

  // Entries of dense and single-row operators; materialized 0/1 matrix for
  // selectors.
  Matrix dense() const;

  const IndexList& indices() const { return indices_; }

  // Natural action of the operator:
  //   dense / single-row / row-subsample: Op * x (x has cols() rows)
  //   column-bernoulli: x * S, i.e. the selected columns of x
  Matrix apply(const Matrix& x) const;

  // One-line dump "kind,rows,cols,seed,scale" from which the operator can be
  // regenerated bit-for-bit.
  std::string to_record() const;
  static SketchOperator from_record(std::string_view record);

  friend bool operator==(const SketchOperator& a, const SketchOperator& b);

 private:
  friend SketchOperator make_gaussian_sketch(Index, Index, std::uint64_t);
  friend SketchOperator make_column_sampler(Index, double, std::uint64_t);
  friend SketchOperator make_row_subsampler(Index, Index, std::uint64_t);
  friend SketchOperator make_probe_vector(Index, std::uint64_t);

  SketchKind kind_ = SketchKind::kDenseGaussian;
  Index rows_ = 0;
  Index cols_ = 0;
  std::uint64_t seed_ = 0;
  double scale_ = 0.0;
  bool degenerate_ = false;
  Matrix entries_;
  IndexList indices_;
};

// rows x cols with i.i.d. N(0, 1/rows) entries drawn in column-major order.
SketchOperator make_gaussian_sketch(Index rows, Index cols, std::uint64_t seed);

// Column i is selected iff uniform_at(seed, i) < gamma. Each decision depends
// only on (seed, i).
SketchOperator make_column_sampler(Index n2, double gamma, std::uint64_t seed);

// m distinct rows of n1 chosen uniformly (partial Fisher-Yates), returned in
// increasing order.
SketchOperator make_row_subsampler(Index n1, Index m, std::uint64_t seed);

// 1 x m vector with i.i.d. N(0, 1) entries.
SketchOperator make_probe_vector(Index m, std::uint64_t seed);

// Inputs to the recovery-guarantee formulas. Logs are natural.
struct SampleBudget {
  Index n1 = 0;
  Index n2 = 0;
  Index n_low_rank = 0;  // nonzero columns of the low-rank part
  Index rank = 1;
  Index outliers = 1;
  double incoherence = 1.0;  // mu_L in [1, n_low_rank / rank]
  double delta = 0.1;        // failure probability in (0, 1]
};

// Distortion used for all budget formulas.
inline constexpr double kBudgetDistortion = 0.25;

// JL exponent f(eps) = eps^2/4 - eps^3/6 of normalized Gaussian matrices.
double jl_exponent(double eps);

struct CountBound {
  Index value = 0;
  bool degenerate = false;  // an input was at a boundary the formula skips
};

struct RateBound {
  double value = 0.0;
  bool infeasible = false;  // value > 1, no valid gamma exists
};

// ceil((5(r+1) + ln k + ln(2/delta)) / f(1/4)); k = 0 drops ln k and flags
// the result degenerate.
CountBound min_row_budget(const SampleBudget& b);

// ceil((11k + 2k ln(n2/k) + ln(2/delta)) / f(1/4)). Throws for k = 0.
Index min_col_budget(const SampleBudget& b);

// max{1/20, 200 ln(5/delta)/n_L, 24 ln(10/delta)/n2, 10 r mu ln(5r/delta)/n_L}.
RateBound min_gamma(const SampleBudget& b);

// floor(n2 / (40 (1 + 121 r mu))). Zero means the guarantee is vacuous.
Index max_outliers(const SampleBudget& b);

}  // namespace outsense
