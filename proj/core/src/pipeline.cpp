#include "outsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "outsense/embed.hpp"
#include "outsense/error.hpp"
#include "outsense/prox.hpp"
#include "outsense/rng.hpp"

namespace outsense {

std::string_view to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kAcos:
      return "acos";
    case PipelineMode::kSacos:
      return "sacos";
    case PipelineMode::kSacosMissing:
      return "sacos_missing";
  }
  return "unknown";
}

PipelineMode parse_pipeline_mode(std::string_view name) {
  for (PipelineMode mode :
       {PipelineMode::kAcos, PipelineMode::kSacos, PipelineMode::kSacosMissing}) {
    if (to_string(mode) == name) return mode;
  }
  throw InvalidArgument("unknown pipeline mode '" + std::string(name) + "'");
}

Matrix DenseSource::sketch_columns(const Matrix& phi, const IndexList& columns) {
  require(phi.cols() == data_.rows(), "sketch width must match matrix height");
  Matrix out(phi.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Index>(j)) = phi * data_.col(columns[j]);
  }
  record(phi.rows() * static_cast<Index>(columns.size()));
  return out;
}

Matrix DenseSource::sketch(const Matrix& phi) {
  require(phi.cols() == data_.rows(), "sketch width must match matrix height");
  record(phi.rows() * data_.cols());
  return phi * data_;
}

RowVector DenseSource::bilinear(const RowVector& w, const Matrix& a) {
  require(w.size() == data_.rows(), "left vector length must match matrix height");
  require(a.cols() == data_.cols(), "right sketch width must match matrix width");
  record(a.rows());
  const RowVector wm = w * data_;
  return wm * a.transpose();
}

void validate(const AcosConfig& cfg, PipelineMode mode) {
  require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "gamma must lie in (0, 1]");
  require(cfg.m >= 1, "row sketch size m must be at least 1");
  if (mode == PipelineMode::kAcos) require(cfg.p >= 1, "column sketch size p must be at least 1");
  require(cfg.lasso_path >= 1, "lasso path needs at least one value");
  require(cfg.energy > 0.0 && cfg.energy <= 1.0, "energy fraction must lie in (0, 1]");
  if (cfg.lambda) require(*cfg.lambda > 0.0, "lambda must be positive");
  require(cfg.gap_ratio > 1.0, "gap ratio must exceed 1");
  require(cfg.zero_tol >= 0.0, "zero tolerance must be nonnegative");
}

double resolve_lambda(const AcosConfig& cfg, Index n2) {
  if (cfg.lambda) return *cfg.lambda;
  if (cfg.k_upper_bound) return default_lambda(*cfg.k_upper_bound);
  return heuristic_lambda(n2);
}

SupportEstimate extract_support(const Vector& scores, const SupportRuleSpec& rule) {
  require(scores.allFinite(), "scores must be finite");
  SupportEstimate est;
  est.scores = scores;
  est.rule = rule;
  const Index n = scores.size();
  if (n == 0) return est;

  if (rule.kind == SupportRule::kFixedThreshold) {
    const double tau = std::max(rule.threshold, rule.zero_floor);
    for (Index i = 0; i < n; ++i) {
      if (scores(i) > tau) est.declared.push_back(i);
    }
    return est;
  }

  const double top = scores.maxCoeff();
  if (top <= rule.zero_floor || top <= 0.0) return est;
  const double floor = std::max(rule.zero_floor, 1e-12 * top);

  IndexList order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });

  double best = 1.0;
  Index cut = -1;
  for (Index i = 0; i + 1 < n; ++i) {
    const double hi = std::max(scores(order[i]), floor);
    const double lo = std::max(scores(order[i + 1]), floor);
    const double ratio = hi / lo;
    if (ratio > best) {
      best = ratio;
      cut = i;
    }
  }
  est.gap = best;
  if (cut >= 0 && best > rule.gap_ratio) {
    est.declared.assign(order.begin(), order.begin() + cut + 1);
    std::sort(est.declared.begin(), est.declared.end());
  }
  return est;
}

MeasurementTally measurement_count(const AcosConfig& cfg, Index n1, Index n2, Index realized_s,
                                   PipelineMode mode) {
  require(n1 >= 1 && n2 >= 1, "matrix dimensions must be positive");
  MeasurementTally tally;
  switch (mode) {
    case PipelineMode::kAcos:
      tally.count = realized_s * cfg.m + cfg.p;
      break;
    case PipelineMode::kSacos:
      tally.count = cfg.m * n2;
      break;
    case PipelineMode::kSacosMissing:
      throw InvalidArgument("missing-data measurement count depends on the mask");
  }
  tally.rate = static_cast<double>(tally.count) / (static_cast<double>(n1) * static_cast<double>(n2));
  return tally;
}

namespace {

// Stream identifiers for operators derived from the configuration seed.
enum : std::uint64_t {
  kRowSketchStream = 1,
  kColumnSampleStream = 2,
  kProbeStream = 3,
  kRightSketchStream = 4,
  kColumnRetryStream = 5,
};

SketchOperator draw_column_sample(Index n2, const AcosConfig& cfg) {
  SketchOperator sample = make_column_sampler(n2, cfg.gamma, derive_seed(cfg.seed, {kColumnSampleStream}));
  if (sample.degenerate()) {
    sample = make_column_sampler(n2, cfg.gamma, derive_seed(cfg.seed, {kColumnRetryStream}));
  }
  if (sample.degenerate()) throw InvalidArgument("column sample is empty after one retry");
  return sample;
}

double rms_column_norm(const Matrix& y) {
  if (y.cols() == 0) return 0.0;
  return y.norm() / std::sqrt(static_cast<double>(y.cols()));
}

void record_step1(PipelineResult& out, const OpSolution& sol, const SubspaceBasis& basis,
                  double lambda) {
  out.lambda = lambda;
  out.op_iterations = sol.iterations;
  out.op_residual = sol.residual;
  out.op_converged = sol.converged;
  out.subspace_dim = basis.dim;
}

}  // namespace

PipelineResult acos(MeasurementSource& source, const AcosConfig& cfg) {
  validate(cfg, PipelineMode::kAcos);
  const Index n1 = source.rows();
  const Index n2 = source.cols();
  require(n2 >= 1, "matrix needs at least one column");
  const Index before = source.measurements();

  PipelineResult out;
  const SketchOperator phi = make_gaussian_sketch(cfg.m, n1, derive_seed(cfg.seed, {kRowSketchStream}));
  const SketchOperator sample = draw_column_sample(n2, cfg);
  out.sampled_columns = sample.cols();

  // Step 1
  const Matrix y1 = source.sketch_columns(phi.dense(), sample.indices());
  const double lambda = resolve_lambda(cfg, n2);
  const OpSolution sol = outlier_pursuit(y1, lambda, cfg.op);
  const ResidualProjector perp(subspace_basis(sol, cfg.energy));
  record_step1(out, sol, perp.basis(), lambda);

  // Step 2: w = phi P_perp Phi, then y = (w M) A^T.
  const SketchOperator probe = make_probe_vector(cfg.m, derive_seed(cfg.seed, {kProbeStream}));
  const Vector probe_perp = perp.apply(Vector(probe.dense().row(0).transpose()));
  const RowVector w = probe_perp.transpose() * phi.dense();
  const SketchOperator right = make_gaussian_sketch(cfg.p, n2, derive_seed(cfg.seed, {kRightSketchStream}));
  const Matrix a = right.dense();
  const Vector y2 = source.bilinear(w, a).transpose();

  const double zero_floor = cfg.zero_tol * rms_column_norm(y1);
  const SupportRuleSpec rule = SupportRuleSpec::gap(cfg.gap_ratio, zero_floor);

  const double max_reg = (a.transpose() * y2).lpNorm<Eigen::Infinity>();
  if (max_reg == 0.0) {
    // Nothing survived the projection: every path solution is zero.
    out.mu_path = regularization_path(0.0, cfg.lasso_path);
    out.path_scores.assign(out.mu_path.size(), Vector::Zero(n2));
    out.support = extract_support(Vector::Zero(n2), rule);
  } else {
    out.mu_path = regularization_path(max_reg, cfg.lasso_path);
    const double lipschitz = spectral_norm_squared(a);
    Vector warm = Vector::Zero(n2);
    bool have_best = false;
    bool have_valid = false;
    for (double mu : out.mu_path) {
      const LassoResult fit = lasso_solve(
          {.design = a,
           .observation = y2,
           .reg = mu,
           .max_iters = cfg.lasso_max_iters,
           .tol = cfg.lasso_tol,
           .lipschitz = lipschitz},
          &warm);
      warm = fit.coefficients;
      Vector scores = fit.coefficients.cwiseAbs();
      SupportEstimate est = extract_support(scores, rule);
      est.mu_used = mu;
      out.path_scores.push_back(std::move(scores));
      // Path runs from the largest mu down: keep the last solution whose gap
      // rule fires. Before any fires, keep the widest gap seen.
      const bool fires = !est.declared.empty();
      if (fires || (!have_valid && (!have_best || est.gap > out.support.gap))) {
        out.support = std::move(est);
        have_best = true;
        have_valid = have_valid || fires;
      }
    }
  }
  out.measurements = source.measurements() - before;
  out.sampling_rate = static_cast<double>(out.measurements) /
                      (static_cast<double>(n1) * static_cast<double>(n2));
  return out;
}

PipelineResult acos(const Matrix& m, const AcosConfig& cfg) {
  DenseSource source(m);
  return acos(source, cfg);
}

PipelineResult sacos(MeasurementSource& source, const AcosConfig& cfg) {
  validate(cfg, PipelineMode::kSacos);
  const Index n1 = source.rows();
  const Index n2 = source.cols();
  require(n2 >= 1, "matrix needs at least one column");
  const Index before = source.measurements();

  PipelineResult out;
  const SketchOperator phi = make_gaussian_sketch(cfg.m, n1, derive_seed(cfg.seed, {kRowSketchStream}));
  const Matrix y = source.sketch(phi.dense());
  const SketchOperator sample = draw_column_sample(n2, cfg);
  out.sampled_columns = sample.cols();
  const Matrix y1 = sample.apply(y);

  const double lambda = resolve_lambda(cfg, n2);
  const OpSolution sol = outlier_pursuit(y1, lambda, cfg.op);
  const ResidualProjector perp(subspace_basis(sol, cfg.energy));
  record_step1(out, sol, perp.basis(), lambda);

  Vector scores = perp.apply(y).colwise().norm().transpose();
  const double zero_floor = cfg.zero_tol * rms_column_norm(y1);
  out.support = extract_support(scores, SupportRuleSpec::gap(cfg.gap_ratio, zero_floor));
  out.path_scores.push_back(std::move(scores));
  out.measurements = source.measurements() - before;
  out.sampling_rate = static_cast<double>(out.measurements) /
                      (static_cast<double>(n1) * static_cast<double>(n2));
  return out;
}

PipelineResult sacos(const Matrix& m, const AcosConfig& cfg) {
  DenseSource source(m);
  return sacos(source, cfg);
}

PipelineResult sacos_missing(const Matrix& m_obs, const Mask& mask, const AcosConfig& cfg) {
  validate(cfg, PipelineMode::kSacosMissing);
  require(mask.rows() == m_obs.rows() && mask.cols() == m_obs.cols(),
          "mask shape must match the matrix");
  const Index n1 = m_obs.rows();
  const Index n2 = m_obs.cols();
  require(n2 >= 1, "matrix needs at least one column");

  PipelineResult out;
  const SketchOperator rows = make_row_subsampler(n1, cfg.m, derive_seed(cfg.seed, {kRowSketchStream}));
  // Phi P_Omega(M) = P_Omega_Phi(Phi M): the selected rows, masked.
  const Index m = cfg.m;
  Matrix y(m, n2);
  Mask seen(m, n2);
  for (Index i = 0; i < m; ++i) {
    const Index src = rows.indices()[static_cast<std::size_t>(i)];
    seen.row(i) = mask.row(src);
    for (Index j = 0; j < n2; ++j) y(i, j) = mask(src, j) ? m_obs(src, j) : 0.0;
  }
  out.measurements = seen.count();
  out.sampling_rate = static_cast<double>(out.measurements) /
                      (static_cast<double>(n1) * static_cast<double>(n2));

  const SketchOperator sample = draw_column_sample(n2, cfg);
  out.sampled_columns = sample.cols();
  const Matrix y1 = sample.apply(y);
  Mask seen1(m, sample.cols());
  for (Index j = 0; j < sample.cols(); ++j) seen1.col(j) = seen.col(sample.indices()[static_cast<std::size_t>(j)]);

  const double lambda = resolve_lambda(cfg, n2);
  const OpSolution sol = rmc_solve(y1, seen1, lambda, cfg.op);
  const SubspaceBasis basis = subspace_basis(sol, cfg.energy);
  record_step1(out, sol, basis, lambda);

  Vector scores = Vector::Zero(n2);
  IndexList observed_rows;
  for (Index j = 0; j < n2; ++j) {
    observed_rows.clear();
    for (Index i = 0; i < m; ++i) {
      if (seen(i, j)) observed_rows.push_back(i);
    }
    const auto count = static_cast<Index>(observed_rows.size());
    if (count == 0) {
      out.unobserved_columns.push_back(j);
      continue;
    }
    if (count <= basis.dim) {
      out.rank_deficient_columns.push_back(j);
      continue;
    }
    Vector sub(count);
    Matrix restricted(count, basis.dim);
    for (Index t = 0; t < count; ++t) {
      sub(t) = y(observed_rows[static_cast<std::size_t>(t)], j);
      restricted.row(t) = basis.basis.row(observed_rows[static_cast<std::size_t>(t)]);
    }
    if (basis.dim > 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(restricted);
      const Index rank = qr.rank();
      if (rank > 0) {
        const Matrix q = Matrix(qr.householderQ()).leftCols(rank);
        sub -= q * (q.transpose() * sub);
      }
    }
    scores(j) = sub.norm();
  }

  const double zero_floor = cfg.zero_tol * rms_column_norm(y1);
  out.support = extract_support(scores, SupportRuleSpec::gap(cfg.gap_ratio, zero_floor));
  out.path_scores.push_back(std::move(scores));
  return out;
}

PipelineResult run_pipeline(PipelineMode mode, const Matrix& m, const AcosConfig& cfg,
                            const Mask* mask) {
  switch (mode) {
    case PipelineMode::kAcos:
      return acos(m, cfg);
    case PipelineMode::kSacos:
      return sacos(m, cfg);
    case PipelineMode::kSacosMissing:
      if (mask) return sacos_missing(m, *mask, cfg);
      return sacos_missing(m, Mask::Constant(m.rows(), m.cols(), true), cfg);
  }
  throw InvalidArgument("unknown pipeline mode");
}

}  // namespace outsense
