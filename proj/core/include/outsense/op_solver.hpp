#pragma once

// Outlier Pursuit:  min ||L||_* + lambda ||C||_{1,2}  s.t.  Y = L + C
// and its masked robust-matrix-completion variant, solved by an inexact
// augmented Lagrangian method with an adaptive penalty.

#include <string>

#include "outsense/types.hpp"

namespace outsense {

struct OpOptions {
  double residual_tol = 1e-7;  // ||Y - L - C||_F / ||Y||_F
  double change_tol = 1e-6;    // (rho / rho_0) ||dC||_F / ||Y||_F
  int max_iters = 500;
  // Penalty schedule: rho_0 = rho_scale / ||Y||_2. Each iteration compares
  // the primal residual and the (rho-weighted) iterate change, both scaled by
  // their tolerances; rho is multiplied by rho_growth when the residual
  // exceeds the change by balance_ratio, divided when the reverse holds, and
  // kept in [rho_0, rho_max_factor * rho_0].
  double rho_scale = 1.25;
  double rho_growth = 1.6;
  double balance_ratio = 10.0;
  double rho_max_factor = 1e7;
  int divergence_window = 10;
};

struct OpSolution {
  Matrix low_rank;
  Matrix column_sparse;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  // Too few observations to pin down even a rank-one matrix.
  bool degenerate = false;
  Index rank = 0;  // rank of the last singular value thresholding step

  // ||L||_* + lambda ||C||_{1,2}
  double objective(double lambda) const;

  // Single structured line, e.g. "op iterations=31 residual=8.1e-08 ...".
  std::string to_log_line() const;
};

// 3 / (7 sqrt(k_ub)).
double default_lambda(Index k_ub);

// Fallback when no outlier bound is known: default_lambda with
// k_ub = max(1, n2 / 10).
double heuristic_lambda(Index n2);

// Throws InvalidArgument for lambda <= 0 or non-finite input, and
// SolverDiverged when the residual grows for divergence_window consecutive
// iterations.
OpSolution outlier_pursuit(const Matrix& y, double lambda, const OpOptions& opts = {});

// Equality enforced only where mask is true; unobserved entries of L + C are
// free. Entries of y_obs outside the mask are ignored.
OpSolution rmc_solve(const Matrix& y_obs, const Mask& mask, double lambda,
                     const OpOptions& opts = {});

// Orthonormal basis of a learned column space.
struct SubspaceBasis {
  Matrix basis;  // m x dim, orthonormal columns
  Index dim = 0;
  double energy_kept = 1.0;  // retained share of the nuclear norm
};

// Keeps the smallest leading d with sigma_1 + ... + sigma_d >= energy * sum.
// energy = 1 keeps every sigma_i > max(m, n) * eps * sigma_1. A zero matrix
// gives dim 0.
SubspaceBasis subspace_basis(const Matrix& low_rank, double energy = 1.0);
SubspaceBasis subspace_basis(const OpSolution& sol, double energy = 1.0);

// v -> v - B (B^T v), the projector onto the orthogonal complement of span(B).
class ResidualProjector {
 public:
  explicit ResidualProjector(SubspaceBasis basis) : basis_(std::move(basis)) {}

  Vector apply(const Vector& v) const;
  // Applies column by column.
  Matrix apply(const Matrix& x) const;

  const SubspaceBasis& basis() const { return basis_; }

 private:
  SubspaceBasis basis_;
};

// Largest principal angle (radians) between span(a) and span(b), computed
// from sin(theta) = ||(I - Qa Qa^T) Qb||_2 with orthonormalized inputs. Spans
// of different dimension return pi / 2.
double principal_angle(const Matrix& a, const Matrix& b);

}  // namespace outsense
