#include "outsense/prox.hpp"

#include <cmath>
#include <limits>

#include "outsense/error.hpp"

namespace outsense {

Vector soft_threshold(const Vector& v, double tau) {
  require(tau >= 0.0, "soft threshold needs tau >= 0");
  return (v.array() - tau).cwiseMax(0.0) + (v.array() + tau).cwiseMin(0.0);
}

Matrix svt(const Matrix& x, double tau) { return svt(x, tau, nullptr); }

Matrix svt(const Matrix& x, double tau, Index* rank) {
  require(tau >= 0.0, "singular value threshold needs tau >= 0");
  if (x.size() == 0) {
    if (rank) *rank = 0;
    return x;
  }
  if (!x.allFinite()) throw NumericalError("svt input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in svt");
  const Vector& sigma = svd.singularValues();
  Index kept = 0;
  while (kept < sigma.size() && sigma(kept) > tau) ++kept;
  if (rank) *rank = kept;
  if (kept == 0) return Matrix::Zero(x.rows(), x.cols());
  const Vector shrunk = sigma.head(kept).array() - tau;
  return svd.matrixU().leftCols(kept) * shrunk.asDiagonal() *
         svd.matrixV().leftCols(kept).transpose();
}

Matrix group_shrink(const Matrix& x, double tau) {
  require(tau >= 0.0, "group shrinkage needs tau >= 0");
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm <= tau) {
      out.col(j).setZero();
    } else {
      out.col(j) = (1.0 - tau / norm) * x.col(j);
    }
  }
  return out;
}

double nuclear_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

double l12_norm(const Matrix& x) { return x.colwise().norm().sum(); }

double spectral_norm_squared(const Matrix& a, int max_iters, double tol) {
  if (a.size() == 0) return 0.0;
  // Deterministic start with no zero components.
  Vector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = w.norm();
    if (!std::isfinite(next)) throw NumericalError("power iteration produced non-finite values");
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - estimate) <= tol * next;
    estimate = next;
    if (done) break;
  }
  return estimate;
}

double lasso_objective(const Matrix& design, const Vector& observation, double reg,
                       const Vector& coefficients) {
  return 0.5 * (observation - design * coefficients).squaredNorm() +
         reg * coefficients.lpNorm<1>();
}

LassoResult lasso_solve(const LassoProblem& prob, const Vector* warm_start) {
  const Matrix& a = prob.design;
  const Vector& b = prob.observation;
  require(prob.reg > 0.0, "lasso regularization must be positive");
  require(a.rows() == b.size(), "lasso observation length must match design rows");
  require(prob.max_iters >= 1, "lasso needs at least one iteration");
  const Index n = a.cols();

  LassoResult result;
  double lipschitz = prob.lipschitz > 0.0 ? prob.lipschitz : spectral_norm_squared(a);
  if (!(lipschitz > 0.0)) throw NumericalError("lasso step size estimation failed (zero design)");
  // Power iteration underestimates slightly; pad so 1/L is a safe step.
  lipschitz *= 1.0 + 1e-6;
  result.diagnostics.lipschitz = lipschitz;
  const double step = 1.0 / lipschitz;

  Vector x = Vector::Zero(n);
  if (warm_start) {
    require(warm_start->size() == n, "warm start has wrong length");
    x = *warm_start;
  }
  Vector ax = a * x;
  auto objective = [&](const Vector& coef, const Vector& a_coef) {
    return 0.5 * (b - a_coef).squaredNorm() + prob.reg * coef.lpNorm<1>();
  };
  double f_prev = objective(x, ax);

  Vector y = x;
  Vector ay = ax;
  double t = 1.0;
  int it = 0;
  for (; it < prob.max_iters; ++it) {
    const Vector grad = a.transpose() * (ay - b);
    Vector x_next = soft_threshold(y - step * grad, step * prob.reg);
    Vector ax_next = a * x_next;
    const double f_next = objective(x_next, ax_next);
    if (!std::isfinite(f_next)) throw NumericalError("lasso iteration produced non-finite values");

    if (f_next > f_prev && t > 1.0) {
      // Momentum overshot: restart from the last accepted iterate.
      ++result.diagnostics.restarts;
      t = 1.0;
      y = x;
      ay = ax;
      continue;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = x_next + beta * (x_next - x);
    ay = ax_next + beta * (ax_next - ax);
    t = t_next;

    const double change = std::abs(f_prev - f_next);
    x.swap(x_next);
    ax.swap(ax_next);
    const double scale = std::max(std::abs(f_prev), std::numeric_limits<double>::min());
    f_prev = f_next;
    if (change <= prob.tol * scale) {
      result.diagnostics.converged = true;
      ++it;
      break;
    }
  }
  result.coefficients = std::move(x);
  result.diagnostics.iterations = it;
  result.diagnostics.objective = f_prev;
  return result;
}

std::vector<double> regularization_path(double max_reg, int count) {
  require(count >= 1, "regularization path needs at least one value");
  require(max_reg >= 0.0, "regularization scale must be nonnegative");
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    path.push_back(max_reg * std::pow(10.0, -3.0 * (j + 1) / (count + 1)));
  }
  return path;
}

}  // namespace outsense
