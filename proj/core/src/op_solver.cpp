#include "outsense/op_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "outsense/error.hpp"
#include "outsense/prox.hpp"

namespace outsense {

double OpSolution::objective(double lambda) const {
  return nuclear_norm(low_rank) + lambda * l12_norm(column_sparse);
}

std::string OpSolution::to_log_line() const {
  char line[256];
  std::snprintf(line, sizeof(line),
                "op iterations=%d residual=%.3e converged=%d degenerate=%d rank=%lld",
                iterations, residual, converged ? 1 : 0, degenerate ? 1 : 0,
                static_cast<long long>(rank));
  return line;
}

double default_lambda(Index k_ub) {
  require(k_ub >= 1, "outlier upper bound k_ub must be at least 1");
  return 3.0 / (7.0 * std::sqrt(static_cast<double>(k_ub)));
}

double heuristic_lambda(Index n2) {
  require(n2 >= 1, "matrix must have at least one column");
  return default_lambda(std::max<Index>(1, n2 / 10));
}

namespace {

OpSolution solve_split(const Matrix& y_in, const Mask* mask, double lambda,
                       const OpOptions& opts) {
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive and finite");
  require(opts.max_iters >= 1, "solver needs at least one iteration");

  Matrix y = y_in;
  if (mask) y = mask->select(y_in, 0.0);
  if (!y.allFinite()) throw InvalidArgument("observed entries must be finite");

  const Index rows = y.rows();
  const Index cols = y.cols();
  OpSolution sol;
  sol.low_rank = Matrix::Zero(rows, cols);
  sol.column_sparse = Matrix::Zero(rows, cols);
  if (mask) {
    const Index observed = mask->count();
    sol.degenerate = observed < rows + cols - 1;
  }

  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    sol.converged = true;
    return sol;
  }

  const double spectral = std::sqrt(spectral_norm_squared(y));
  double rho = opts.rho_scale / spectral;
  const double rho_max = rho * opts.rho_max_factor;

  Matrix& l = sol.low_rank;
  Matrix& c = sol.column_sparse;
  Matrix free_part;  // values assigned to unobserved entries
  if (mask) free_part = Matrix::Zero(rows, cols);
  Matrix dual = Matrix::Zero(rows, cols);

  const double rho_min = rho;
  double prev_residual = std::numeric_limits<double>::infinity();
  double first_residual = 0.0;
  int increases = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const double inv_rho = 1.0 / rho;
    Matrix target = y - c + inv_rho * dual;
    if (mask) target -= free_part;
    Matrix l_next = svt(target, inv_rho, &sol.rank);

    target = y - l_next + inv_rho * dual;
    if (mask) target -= free_part;
    Matrix c_next = group_shrink(target, lambda * inv_rho);

    Matrix gap = y - l_next - c_next;
    Matrix free_next;
    if (mask) {
      free_next = (!mask->array()).select(gap + inv_rho * dual, 0.0);
      gap -= free_next;
    }
    dual += rho * gap;

    // Dual residual, measured in units of the initial penalty so that a
    // large rho cannot mask a stalled iterate.
    Matrix shift = c_next - c;
    if (mask) shift += free_next - free_part;
    const double residual = gap.norm() / y_norm;
    const double change = (rho / rho_min) * shift.norm() / y_norm;
    l.swap(l_next);
    c.swap(c_next);
    if (mask) free_part.swap(free_next);
    sol.iterations = it + 1;
    sol.residual = residual;
    if (!std::isfinite(residual)) throw NumericalError("outlier pursuit produced non-finite iterates");

    if (it == 0) first_residual = residual;
    // ADMM residuals oscillate; only a run of increases above the starting
    // level counts as divergence.
    increases = residual > prev_residual && residual > first_residual ? increases + 1 : 0;
    prev_residual = residual;
    if (residual <= opts.residual_tol && change <= opts.change_tol) {
      sol.converged = true;
      break;
    }
    const double scaled_res = residual / opts.residual_tol;
    const double scaled_change = change / opts.change_tol;
    if (scaled_res > opts.balance_ratio * scaled_change && rho < rho_max) {
      rho = std::min(rho * opts.rho_growth, rho_max);
      increases = 0;
    } else if (scaled_change > opts.balance_ratio * scaled_res && rho > rho_min) {
      rho = std::max(rho / opts.rho_growth, rho_min);
      increases = 0;
    }
    if (increases >= opts.divergence_window) {
      throw SolverDiverged("outlier pursuit residual increased for " +
                           std::to_string(opts.divergence_window) + " consecutive iterations");
    }
  }
  // Unobserved entries of L + C are free; report the full estimates.
  return sol;
}

// Orthonormal basis of the numerical column space of x.
Matrix orthonormal_range(const Matrix& x) {
  return subspace_basis(x, 1.0).basis;
}

}  // namespace

OpSolution outlier_pursuit(const Matrix& y, double lambda, const OpOptions& opts) {
  return solve_split(y, nullptr, lambda, opts);
}

OpSolution rmc_solve(const Matrix& y_obs, const Mask& mask, double lambda,
                     const OpOptions& opts) {
  require(mask.rows() == y_obs.rows() && mask.cols() == y_obs.cols(),
          "mask shape must match the observation matrix");
  require(mask.count() > 0, "mask observes no entries");
  return solve_split(y_obs, &mask, lambda, opts);
}

SubspaceBasis subspace_basis(const Matrix& low_rank, double energy) {
  require(energy > 0.0 && energy <= 1.0, "energy fraction must lie in (0, 1]");
  SubspaceBasis out;
  out.basis = Matrix::Zero(low_rank.rows(), 0);
  if (low_rank.size() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(low_rank, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in subspace_basis");
  const Vector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return out;

  const double cutoff = static_cast<double>(std::max(low_rank.rows(), low_rank.cols())) *
                        std::numeric_limits<double>::epsilon() * sigma(0);
  Index numerical_rank = 0;
  while (numerical_rank < sigma.size() && sigma(numerical_rank) > cutoff) ++numerical_rank;

  const double total = sigma.head(numerical_rank).sum();
  Index dim = numerical_rank;
  double kept = total;
  if (energy < 1.0) {
    double running = 0.0;
    for (Index d = 0; d < numerical_rank; ++d) {
      running += sigma(d);
      if (running >= energy * total) {
        dim = d + 1;
        kept = running;
        break;
      }
    }
  }
  out.dim = dim;
  out.basis = svd.matrixU().leftCols(dim);
  out.energy_kept = kept / total;
  return out;
}

SubspaceBasis subspace_basis(const OpSolution& sol, double energy) {
  return subspace_basis(sol.low_rank, energy);
}

Vector ResidualProjector::apply(const Vector& v) const {
  require(v.size() == basis_.basis.rows(), "projector applied to vector of wrong length");
  if (basis_.dim == 0) return v;
  return v - basis_.basis * (basis_.basis.transpose() * v);
}

Matrix ResidualProjector::apply(const Matrix& x) const {
  require(x.rows() == basis_.basis.rows(), "projector applied to matrix of wrong height");
  if (basis_.dim == 0) return x;
  return x - basis_.basis * (basis_.basis.transpose() * x);
}

double principal_angle(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "subspaces must live in the same ambient space");
  const Matrix qa = orthonormal_range(a);
  const Matrix qb = orthonormal_range(b);
  if (qa.cols() != qb.cols()) return std::numbers::pi / 2.0;
  if (qa.cols() == 0) return 0.0;
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::BDCSVD<Matrix> svd(residual);
  const double sine = std::min(1.0, svd.singularValues()(0));
  return std::asin(sine);
}

}  // namespace outsense
