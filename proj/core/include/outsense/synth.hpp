#pragma once

// Synthetic low-rank-plus-column-outlier instances, noise and mask
// injection, the threshold-existence success oracle, and statistical
// helpers used by the test suites.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "outsense/pipeline.hpp"
#include "outsense/rng.hpp"
#include "outsense/types.hpp"

namespace outsense {

struct ProblemInstance {
  Matrix observed;     // M = L + C (+ N)
  Matrix low_rank;     // L = [U V^T, 0]
  Matrix outliers;     // C = [0, W]
  IndexList support;   // outlier columns, increasing
  Index rank = 0;
  bool normalized = false;
  double noise_sigma = 0.0;
  std::optional<Mask> mask;
  std::uint64_t seed = 0;

  Index rows() const { return observed.rows(); }
  Index cols() const { return observed.cols(); }
};

// U (n1 x r) and V ((n2 - k) x r) have i.i.d. N(0, 1) entries, W (n1 x k)
// i.i.d. N(0, r), so every column has expected squared norm n1 r. Outliers
// occupy the trailing k columns. With `normalize`, each column of L + C is
// scaled to unit norm (L and C columns scaled alike).
ProblemInstance generate_instance(Index n1, Index n2, Index r, Index k, std::uint64_t seed,
                                  bool normalize = false);

// M <- L + C + N with N i.i.d. N(0, sigma^2).
ProblemInstance add_noise(ProblemInstance inst, double sigma, std::uint64_t seed);

// Each entry observed independently with probability p_omega.
Mask bernoulli_mask(Index n1, Index n2, double p_omega, std::uint64_t seed);

// Applies the column permutation new_col(j) = old_col(perm[j]) to every
// matrix and remaps the support.
ProblemInstance permute_columns(const ProblemInstance& inst, const IndexList& perm);

// True iff some score vector admits tau with
//   min_{i in support} s_i > tau > max_{j not in support} s_j.
// An empty support succeeds only when the maximum score is 0.
bool oracle_success(const std::vector<Vector>& scores_per_mu, const IndexList& support);

// mu_L = max_i ||V^T e_i||^2 * n_L / r from the compact SVD of L, where
// n_L counts nonzero columns and r is the numerical rank.
double column_incoherence(const Matrix& low_rank);

// exp(-eps^2 n p / (2 (1 + eps / 3))) with p = M / N bounds
// Pr(H >= (1 + eps) n p) for H ~ hyp(N, M, n).
double hypergeometric_tail_bound(Index population, Index positives, Index draws, double eps);

// Draws from hyp(population, positives, draws) by sequential sampling
// without replacement.
Index sample_hypergeometric(Index population, Index positives, Index draws, CounterRng& rng);

struct PhaseGridSpec {
  PipelineMode mode = PipelineMode::kAcos;
  Index n1 = 100;
  Index n2 = 1000;
  AcosConfig config;  // template; lambda and seed are overwritten per trial
  std::vector<Index> r_values;
  std::vector<Index> k_values;
  std::vector<double> lambdas{0.3, 0.4, 0.5};
  int trials = 20;
  std::uint64_t seed = 0;
  bool normalize = false;
  double noise_sigma = 0.0;
  double p_omega = 1.0;  // sacos_missing only
  int threads = 1;
};

struct PhaseCell {
  Index r = 0;
  Index k = 0;
  bool feasible = true;
  double success_rate = 0.0;  // max over lambda of mean success
  double lambda_best = 0.0;
  std::vector<double> per_lambda;
  double sampling_rate = 0.0;  // mean realized rate over all runs of the cell
};

struct PhaseGridResult {
  PipelineMode mode = PipelineMode::kAcos;
  std::vector<Index> r_values;
  std::vector<Index> k_values;
  std::vector<double> lambda_set;
  int trials_per_cell = 0;
  AcosConfig config;
  double sampling_rate = 0.0;  // nominal rate of the configuration
  std::vector<PhaseCell> cells;  // r-major: index = ri * k_values.size() + ki

  const PhaseCell& at(std::size_t ri, std::size_t ki) const {
    return cells[ri * k_values.size() + ki];
  }
};

// Seed of one (r, k, lambda, trial) run: master ^ H(r, k, lambda_index, trial).
std::uint64_t trial_seed(std::uint64_t master, Index r, Index k, std::size_t lambda_index,
                         int trial);

// One Monte-Carlo run: fresh instance and operators from `seed`, scored by
// oracle_success. Returns (success, realized sampling rate).
std::pair<bool, double> run_trial(const PhaseGridSpec& spec, Index r, Index k, double lambda,
                                  std::uint64_t seed);

// Cells with r > n2 - k or k >= n2 are marked infeasible. Results do not
// depend on spec.threads.
PhaseGridResult phase_grid(const PhaseGridSpec& spec);

// Nominal sampling rate: (gamma n2 m + p) / (n1 n2) for acos, m / n1 for
// sacos, p_omega m / n1 for sacos_missing.
double nominal_sampling_rate(const PhaseGridSpec& spec);

// CSV "r,k,lambda_best,success_rate,trials,sampling_rate" with six decimals.
// Infeasible cells are omitted.
std::string phase_grid_csv(const PhaseGridResult& result);

// Binary PGM (P5), one pixel per cell, value round(255 * success_rate).
// Columns follow k ascending; rows follow r descending so the smallest rank
// sits on the bottom row. Infeasible cells are black.
std::string phase_grid_pgm(const PhaseGridResult& result);

}  // namespace outsense
