#pragma once

// End-to-end outlier-column identification from adaptive sketches:
//
//   ACOS   Step 1 learns the column space of Phi M from a Bernoulli column
//          subsample via outlier pursuit. Step 2 collects the p scalars
//          y = phi P_perp Phi M A^T and decodes the sparse vector c from
//          y = c A^T by a LASSO path.
//   SACOS  sketches every column once (Y = Phi M) and scores each column by
//          the norm of its component orthogonal to the learned subspace.
//   SACOS with missing data uses a row subsampler for Phi, solves the masked
//          problem in Step 1 and scores each column on its observed rows.

#include <cstdint>
#include <optional>
#include <vector>

#include "outsense/op_solver.hpp"
#include "outsense/types.hpp"

namespace outsense {

enum class PipelineMode { kAcos, kSacos, kSacosMissing };

std::string_view to_string(PipelineMode mode);
PipelineMode parse_pipeline_mode(std::string_view name);

// Read-only access to M through linear measurements. Every scalar handed
// back is counted, so a pipeline's measurement total can be audited.
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  // phi * M(:, columns); costs phi.rows() * columns.size().
  virtual Matrix sketch_columns(const Matrix& phi, const IndexList& columns) = 0;
  // phi * M; costs phi.rows() * cols().
  virtual Matrix sketch(const Matrix& phi) = 0;
  // (w M) A^T for a row vector w and a p x n2 matrix A; costs p.
  virtual RowVector bilinear(const RowVector& w, const Matrix& a) = 0;

  Index measurements() const { return count_; }

 protected:
  void record(Index n) { count_ += n; }

 private:
  Index count_ = 0;
};

// MeasurementSource over an in-memory matrix.
class DenseSource final : public MeasurementSource {
 public:
  explicit DenseSource(const Matrix& data) : data_(data) {}

  Index rows() const override { return data_.rows(); }
  Index cols() const override { return data_.cols(); }
  Matrix sketch_columns(const Matrix& phi, const IndexList& columns) override;
  Matrix sketch(const Matrix& phi) override;
  RowVector bilinear(const RowVector& w, const Matrix& a) override;

 private:
  const Matrix& data_;
};

struct AcosConfig {
  double gamma = 0.2;
  Index m = 0;
  Index p = 0;  // unused by SACOS
  // Outlier pursuit weight. When unset: default_lambda(k_upper_bound) if a
  // bound is given, heuristic_lambda(n2) otherwise.
  std::optional<double> lambda;
  std::optional<Index> k_upper_bound;
  int lasso_path = 10;
  double energy = 1.0;  // rank-reduction fraction passed to subspace_basis
  std::uint64_t seed = 0;

  OpOptions op;
  int lasso_max_iters = 2000;
  double lasso_tol = 1e-8;

  // Support extraction: declare above the largest multiplicative gap when
  // it exceeds gap_ratio. Scores below zero_tol times the RMS column norm of
  // the Step 1 sketch count as zero.
  double gap_ratio = 10.0;
  double zero_tol = 1e-6;
};

void validate(const AcosConfig& cfg, PipelineMode mode);
double resolve_lambda(const AcosConfig& cfg, Index n2);

enum class SupportRule { kNonzeroWithGap, kFixedThreshold };

struct SupportRuleSpec {
  SupportRule kind = SupportRule::kNonzeroWithGap;
  double threshold = 0.0;   // fixed-threshold tau
  double gap_ratio = 10.0;  // nonzero-with-gap separator
  double zero_floor = 0.0;  // scores <= zero_floor are treated as zero

  static SupportRuleSpec gap(double ratio = 10.0, double zero_floor = 0.0) {
    return {SupportRule::kNonzeroWithGap, 0.0, ratio, zero_floor};
  }
  static SupportRuleSpec fixed(double tau, double zero_floor = 0.0) {
    return {SupportRule::kFixedThreshold, tau, 10.0, zero_floor};
  }
};

struct SupportEstimate {
  Vector scores;
  IndexList declared;  // increasing
  SupportRuleSpec rule;
  std::optional<double> mu_used;
  double gap = 1.0;  // largest multiplicative gap found (gap rule)
};

// Gap rule: sort scores descending, floor them at max(zero_floor,
// 1e-12 * max score), and declare everything above the largest ratio of
// consecutive scores when that ratio exceeds gap_ratio. Fixed rule:
// declare {i : score_i > max(threshold, zero_floor)}.
SupportEstimate extract_support(const Vector& scores, const SupportRuleSpec& rule);

struct MeasurementTally {
  Index count = 0;
  double rate = 0.0;  // count / (n1 n2)
};

// acos: realized_s * m + p; sacos: m * n2.
MeasurementTally measurement_count(const AcosConfig& cfg, Index n1, Index n2, Index realized_s,
                                   PipelineMode mode);

struct PipelineResult {
  SupportEstimate support;
  // Scores for every LASSO regularization value (ACOS) or the single
  // residual-norm vector (SACOS variants).
  std::vector<Vector> path_scores;
  std::vector<double> mu_path;
  Index measurements = 0;
  double sampling_rate = 0.0;
  Index sampled_columns = 0;
  Index subspace_dim = 0;
  double lambda = 0.0;
  int op_iterations = 0;
  double op_residual = 0.0;
  bool op_converged = false;
  // sacos_missing only.
  IndexList unobserved_columns;
  IndexList rank_deficient_columns;
};

// The declared support comes from the smallest mu on the LASSO path whose
// gap rule declares a nonempty set; LASSO zeros are exact, so larger mu only
// drop true outliers.
PipelineResult acos(MeasurementSource& source, const AcosConfig& cfg);
PipelineResult acos(const Matrix& m, const AcosConfig& cfg);

PipelineResult sacos(MeasurementSource& source, const AcosConfig& cfg);
PipelineResult sacos(const Matrix& m, const AcosConfig& cfg);

// sampling_rate holds the fraction of entries that are both observed and in
// a selected row.
PipelineResult sacos_missing(const Matrix& m_obs, const Mask& mask, const AcosConfig& cfg);

// Dispatch on mode. kSacosMissing requires a mask.
PipelineResult run_pipeline(PipelineMode mode, const Matrix& m, const AcosConfig& cfg,
                            const Mask* mask = nullptr);

}  // namespace outsense
