#include "outsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "outsense/error.hpp"
#include "outsense/rng.hpp"

namespace outsense {

namespace {

void fill_normal(Matrix& x, CounterRng& rng, double stddev) {
  double* data = x.data();
  for (Index i = 0; i < x.size(); ++i) data[i] = stddev * rng.normal();
}

}  // namespace

ProblemInstance generate_instance(Index n1, Index n2, Index r, Index k, std::uint64_t seed,
                                  bool normalize) {
  require(n1 >= 1 && n2 >= 1, "instance dimensions must be positive");
  require(k >= 0 && k < n2, "outlier count must satisfy 0 <= k < n2");
  require(r >= 1, "rank must be at least 1");
  require(r <= n2 - k, "rank cannot exceed the number of low-rank columns n2 - k");
  require(r <= n1, "rank cannot exceed n1");

  const Index n_low = n2 - k;
  CounterRng rng(seed);
  Matrix u(n1, r);
  Matrix v(n_low, r);
  Matrix w(n1, k);
  fill_normal(u, rng, 1.0);
  fill_normal(v, rng, 1.0);
  fill_normal(w, rng, std::sqrt(static_cast<double>(r)));

  ProblemInstance inst;
  inst.rank = r;
  inst.seed = seed;
  inst.normalized = normalize;
  inst.low_rank = Matrix::Zero(n1, n2);
  inst.outliers = Matrix::Zero(n1, n2);
  inst.low_rank.leftCols(n_low) = u * v.transpose();
  inst.outliers.rightCols(k) = w;
  if (normalize) {
    for (Index j = 0; j < n2; ++j) {
      const double norm = (inst.low_rank.col(j) + inst.outliers.col(j)).norm();
      if (norm > 0.0) {
        inst.low_rank.col(j) /= norm;
        inst.outliers.col(j) /= norm;
      }
    }
  }
  inst.observed = inst.low_rank + inst.outliers;
  for (Index j = n_low; j < n2; ++j) inst.support.push_back(j);
  return inst;
}

ProblemInstance add_noise(ProblemInstance inst, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0, "noise level must be nonnegative");
  inst.noise_sigma = sigma;
  inst.observed = inst.low_rank + inst.outliers;
  if (sigma > 0.0) {
    Matrix noise(inst.rows(), inst.cols());
    CounterRng rng(seed);
    fill_normal(noise, rng, sigma);
    inst.observed += noise;
  }
  return inst;
}

Mask bernoulli_mask(Index n1, Index n2, double p_omega, std::uint64_t seed) {
  require(p_omega > 0.0 && p_omega <= 1.0, "observation probability must lie in (0, 1]");
  require(n1 >= 0 && n2 >= 0, "mask dimensions must be nonnegative");
  Mask mask(n1, n2);
  CounterRng rng(seed);
  bool* data = mask.data();
  for (Index i = 0; i < mask.size(); ++i) data[i] = rng.uniform() < p_omega;
  return mask;
}

ProblemInstance permute_columns(const ProblemInstance& inst, const IndexList& perm) {
  const Index n2 = inst.cols();
  require(static_cast<Index>(perm.size()) == n2, "permutation length must equal column count");
  IndexList inverse(perm.size(), -1);
  for (std::size_t j = 0; j < perm.size(); ++j) {
    require(perm[j] >= 0 && perm[j] < n2 && inverse[static_cast<std::size_t>(perm[j])] < 0,
            "not a permutation");
    inverse[static_cast<std::size_t>(perm[j])] = static_cast<Index>(j);
  }
  ProblemInstance out = inst;
  for (Index j = 0; j < n2; ++j) {
    const Index src = perm[static_cast<std::size_t>(j)];
    out.observed.col(j) = inst.observed.col(src);
    out.low_rank.col(j) = inst.low_rank.col(src);
    out.outliers.col(j) = inst.outliers.col(src);
    if (inst.mask) out.mask->col(j) = inst.mask->col(src);
  }
  out.support.clear();
  for (Index old : inst.support) out.support.push_back(inverse[static_cast<std::size_t>(old)]);
  std::sort(out.support.begin(), out.support.end());
  return out;
}

bool oracle_success(const std::vector<Vector>& scores_per_mu, const IndexList& support) {
  require(!scores_per_mu.empty(), "oracle needs at least one score vector");
  for (const Vector& scores : scores_per_mu) {
    const Index n = scores.size();
    std::vector<bool> in_support(static_cast<std::size_t>(n), false);
    for (Index i : support) {
      require(i >= 0 && i < n, "support index out of range");
      in_support[static_cast<std::size_t>(i)] = true;
    }
    double min_in = std::numeric_limits<double>::infinity();
    double max_out = 0.0;  // tau must be positive
    bool any_in = false;
    for (Index i = 0; i < n; ++i) {
      const double s = std::abs(scores(i));
      if (in_support[static_cast<std::size_t>(i)]) {
        min_in = std::min(min_in, s);
        any_in = true;
      } else {
        max_out = std::max(max_out, s);
      }
    }
    if (!any_in) {
      if (max_out == 0.0) return true;
      continue;
    }
    if (min_in > max_out) return true;
  }
  return false;
}

double column_incoherence(const Matrix& low_rank) {
  require(low_rank.size() > 0, "incoherence needs a nonempty matrix");
  Eigen::BDCSVD<Matrix> svd(low_rank, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  require(sigma.size() > 0 && sigma(0) > 0.0, "incoherence is undefined for a zero matrix");
  const double cutoff = static_cast<double>(std::max(low_rank.rows(), low_rank.cols())) *
                        std::numeric_limits<double>::epsilon() * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  Index nonzero_cols = 0;
  for (Index j = 0; j < low_rank.cols(); ++j) {
    if (low_rank.col(j).squaredNorm() > 0.0) ++nonzero_cols;
  }
  const Matrix v = svd.matrixV().leftCols(r);
  const double leverage = v.rowwise().squaredNorm().maxCoeff();
  return leverage * static_cast<double>(nonzero_cols) / static_cast<double>(r);
}

double hypergeometric_tail_bound(Index population, Index positives, Index draws, double eps) {
  require(population >= 1, "population must be positive");
  require(positives >= 0 && positives <= population, "positives must lie in [0, N]");
  require(draws >= 0 && draws <= population, "draws must lie in [0, N]");
  require(eps >= 0.0, "eps must be nonnegative");
  const double np = static_cast<double>(draws) * static_cast<double>(positives) /
                    static_cast<double>(population);
  return std::exp(-eps * eps * np / (2.0 * (1.0 + eps / 3.0)));
}

Index sample_hypergeometric(Index population, Index positives, Index draws, CounterRng& rng) {
  Index remaining = population;
  Index good = positives;
  Index hits = 0;
  for (Index d = 0; d < draws; ++d) {
    if (rng.below(static_cast<std::uint64_t>(remaining)) < static_cast<std::uint64_t>(good)) {
      ++hits;
      --good;
    }
    --remaining;
  }
  return hits;
}

}  // namespace outsense
