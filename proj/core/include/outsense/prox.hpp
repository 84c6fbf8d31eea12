#pragma once

// Proximal operators and the accelerated LASSO solver.

#include <vector>

#include "outsense/types.hpp"

namespace outsense {

// sign(v) * max(|v| - tau, 0), elementwise.
Vector soft_threshold(const Vector& v, double tau);

// Singular value thresholding: U max(S - tau, 0) V^T. The prox of
// tau * nuclear norm. Throws NumericalError when the SVD fails.
Matrix svt(const Matrix& x, double tau);

// Same as svt() and also reports how many singular values survived.
Matrix svt(const Matrix& x, double tau, Index* rank);

// Column-wise group shrinkage c * max(1 - tau / ||c||, 0). The prox of
// tau * (sum of column l2 norms).
Matrix group_shrink(const Matrix& x, double tau);

double nuclear_norm(const Matrix& x);
double l12_norm(const Matrix& x);

// Largest squared singular value of `a` by power iteration on a^T a.
double spectral_norm_squared(const Matrix& a, int max_iters = 50, double tol = 1e-8);

// min_c 0.5 ||observation - design * c||^2 + reg * ||c||_1
//
// The design is p x n2 (the right sketch A); coefficients have length n2.
struct LassoProblem {
  const Matrix& design;
  const Vector& observation;
  double reg = 0.0;
  int max_iters = 2000;
  double tol = 1e-8;  // relative objective change
  double lipschitz = 0.0;  // ||design||^2; computed when <= 0
};

struct LassoDiagnostics {
  int iterations = 0;
  int restarts = 0;
  double objective = 0.0;
  double lipschitz = 0.0;
  bool converged = false;
};

struct LassoResult {
  Vector coefficients;
  LassoDiagnostics diagnostics;
};

double lasso_objective(const Matrix& design, const Vector& observation, double reg,
                       const Vector& coefficients);

// FISTA with function-value restart and step 1/L. `warm_start`, when given,
// seeds the iterate.
LassoResult lasso_solve(const LassoProblem& prob, const Vector* warm_start = nullptr);

// `count` regularization values geometrically spaced strictly inside
// (1e-3, 1) * max_reg, largest first: max_reg * 10^(-3 (j + 1) / (count + 1)).
std::vector<double> regularization_path(double max_reg, int count = 10);

}  // namespace outsense
