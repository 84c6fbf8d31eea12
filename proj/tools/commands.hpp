#pragma once

// The `outsense` command-line front end. Commands write their report to
// `out` and diagnostics to `err` and return the process exit status:
//
//   0  success
//   1  the command ran but the result was negative (detect --truth
//      mismatch, oracle failure)
//   2  invalid input: bad arguments, malformed config or data file, I/O
//   3  solver failure (divergence or a numerical breakdown)

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "outsense/pipeline.hpp"
#include "outsense/synth.hpp"

namespace outsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitSolver = 3;

// Parses `args` (args[0] is the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Config keys shared by `phase` and `detect`: gamma, m, p, lambda,
// k_upper_bound, lasso_path, energy, seed, gap_ratio, zero_tol,
// lasso_max_iters, lasso_tol, op_max_iters. Unknown keys are rejected.
void apply_pipeline_keys(const nlohmann::json& cfg, AcosConfig& out);

// Phase-grid config: the pipeline keys plus mode, n1, n2, r_values,
// k_values, lambdas, trials, normalize, noise_sigma, p_omega, threads.
PhaseGridSpec parse_phase_config(const nlohmann::json& cfg);

}  // namespace outsense::cli
