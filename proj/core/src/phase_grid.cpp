#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "outsense/error.hpp"
#include "outsense/rng.hpp"
#include "outsense/synth.hpp"

namespace outsense {

std::uint64_t trial_seed(std::uint64_t master, Index r, Index k, std::size_t lambda_index,
                         int trial) {
  return derive_seed(master, {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(lambda_index),
                              static_cast<std::uint64_t>(trial)});
}

namespace {

enum : std::uint64_t {
  kInstanceStream = 1,
  kNoiseStream = 2,
  kOperatorStream = 3,
  kMaskStream = 4,
};

bool cell_feasible(const PhaseGridSpec& spec, Index r, Index k) {
  return r >= 1 && k >= 0 && k < spec.n2 && r <= spec.n2 - k && r <= spec.n1;
}

PhaseCell run_cell(const PhaseGridSpec& spec, Index r, Index k) {
  PhaseCell cell;
  cell.r = r;
  cell.k = k;
  cell.feasible = cell_feasible(spec, r, k);
  if (!cell.feasible) return cell;

  double rate_sum = 0.0;
  int runs = 0;
  for (std::size_t li = 0; li < spec.lambdas.size(); ++li) {
    int successes = 0;
    for (int t = 0; t < spec.trials; ++t) {
      const auto [ok, rate] =
          run_trial(spec, r, k, spec.lambdas[li], trial_seed(spec.seed, r, k, li, t));
      successes += ok ? 1 : 0;
      rate_sum += rate;
      ++runs;
    }
    const double freq = static_cast<double>(successes) / spec.trials;
    cell.per_lambda.push_back(freq);
    if (li == 0 || freq > cell.success_rate) {
      cell.success_rate = freq;
      cell.lambda_best = spec.lambdas[li];
    }
  }
  cell.sampling_rate = runs > 0 ? rate_sum / runs : 0.0;
  return cell;
}

}  // namespace

std::pair<bool, double> run_trial(const PhaseGridSpec& spec, Index r, Index k, double lambda,
                                  std::uint64_t seed) {
  ProblemInstance inst = generate_instance(spec.n1, spec.n2, r, k,
                                           derive_seed(seed, {kInstanceStream}), spec.normalize);
  if (spec.noise_sigma > 0.0) {
    inst = add_noise(std::move(inst), spec.noise_sigma, derive_seed(seed, {kNoiseStream}));
  }
  AcosConfig cfg = spec.config;
  cfg.lambda = lambda;
  cfg.seed = derive_seed(seed, {kOperatorStream});

  std::optional<Mask> mask;
  if (spec.mode == PipelineMode::kSacosMissing) {
    mask = bernoulli_mask(spec.n1, spec.n2, spec.p_omega, derive_seed(seed, {kMaskStream}));
  }
  try {
    const PipelineResult result =
        run_pipeline(spec.mode, inst.observed, cfg, mask ? &*mask : nullptr);
    return {oracle_success(result.path_scores, inst.support), result.sampling_rate};
  } catch (const SolverDiverged&) {
    return {false, 0.0};
  } catch (const NumericalError&) {
    return {false, 0.0};
  }
}

PhaseGridResult phase_grid(const PhaseGridSpec& spec) {
  require(!spec.r_values.empty() && !spec.k_values.empty(), "grid axes must be nonempty");
  require(!spec.lambdas.empty(), "lambda set must be nonempty");
  require(spec.trials >= 1, "trials must be at least 1");
  validate(spec.config, spec.mode);

  PhaseGridResult result;
  result.mode = spec.mode;
  result.r_values = spec.r_values;
  result.k_values = spec.k_values;
  result.lambda_set = spec.lambdas;
  result.trials_per_cell = spec.trials;
  result.config = spec.config;
  result.sampling_rate = nominal_sampling_rate(spec);

  const std::size_t nk = spec.k_values.size();
  const std::size_t total = spec.r_values.size() * nk;
  result.cells.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      result.cells[idx] = run_cell(spec, spec.r_values[idx / nk], spec.k_values[idx % nk]);
    }
  };
  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

double nominal_sampling_rate(const PhaseGridSpec& spec) {
  const double n1 = static_cast<double>(spec.n1);
  const double n2 = static_cast<double>(spec.n2);
  const double m = static_cast<double>(spec.config.m);
  switch (spec.mode) {
    case PipelineMode::kAcos:
      return (spec.config.gamma * n2 * m + static_cast<double>(spec.config.p)) / (n1 * n2);
    case PipelineMode::kSacos:
      return m / n1;
    case PipelineMode::kSacosMissing:
      return spec.p_omega * m / n1;
  }
  return 0.0;
}

std::string phase_grid_csv(const PhaseGridResult& result) {
  std::string out = "r,k,lambda_best,success_rate,trials,sampling_rate\n";
  char line[160];
  for (const PhaseCell& cell : result.cells) {
    if (!cell.feasible) continue;
    std::snprintf(line, sizeof(line), "%lld,%lld,%.6f,%.6f,%d,%.6f\n",
                  static_cast<long long>(cell.r), static_cast<long long>(cell.k),
                  cell.lambda_best, cell.success_rate, result.trials_per_cell,
                  cell.sampling_rate);
    out += line;
  }
  return out;
}

std::string phase_grid_pgm(const PhaseGridResult& result) {
  const std::size_t width = result.k_values.size();
  const std::size_t height = result.r_values.size();
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t ri = height - 1 - row;
    for (std::size_t ki = 0; ki < width; ++ki) {
      const PhaseCell& cell = result.at(ri, ki);
      const double value = cell.feasible ? std::round(255.0 * cell.success_rate) : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(value, 0.0, 255.0))));
    }
  }
  return out;
}

}  // namespace outsense
