#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "outsense/embed.hpp"
#include "outsense/error.hpp"
#include "outsense/image.hpp"
#include "outsense/matrix_io.hpp"
#include "outsense/saliency.hpp"

namespace outsense::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kPipelineKeys = {
    "gamma",      "m",        "p",         "lambda",          "k_upper_bound",
    "lasso_path", "energy",   "seed",      "gap_ratio",       "zero_tol",
    "lasso_max_iters", "lasso_tol", "op_max_iters"};

const std::set<std::string> kGridKeys = {"mode",     "n1",          "n2",      "r_values",
                                         "k_values", "lambdas",     "trials",  "normalize",
                                         "noise_sigma", "p_omega", "threads"};

template <typename T>
T get_as(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& cfg, const std::set<std::string>& a, const std::set<std::string>& b) {
  if (!cfg.is_object()) throw InvalidArgument("config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!a.count(it.key()) && !b.count(it.key())) {
      throw InvalidArgument("unknown config key '" + it.key() + "'");
    }
  }
}

void apply_keys(const json& cfg, AcosConfig& out) {
  if (cfg.contains("gamma")) out.gamma = get_as<double>(cfg, "gamma");
  if (cfg.contains("m")) out.m = get_as<Index>(cfg, "m");
  if (cfg.contains("p")) out.p = get_as<Index>(cfg, "p");
  if (cfg.contains("lambda")) out.lambda = get_as<double>(cfg, "lambda");
  if (cfg.contains("k_upper_bound")) out.k_upper_bound = get_as<Index>(cfg, "k_upper_bound");
  if (cfg.contains("lasso_path")) out.lasso_path = get_as<int>(cfg, "lasso_path");
  if (cfg.contains("energy")) out.energy = get_as<double>(cfg, "energy");
  if (cfg.contains("seed")) out.seed = get_as<std::uint64_t>(cfg, "seed");
  if (cfg.contains("gap_ratio")) out.gap_ratio = get_as<double>(cfg, "gap_ratio");
  if (cfg.contains("zero_tol")) out.zero_tol = get_as<double>(cfg, "zero_tol");
  if (cfg.contains("lasso_max_iters")) out.lasso_max_iters = get_as<int>(cfg, "lasso_max_iters");
  if (cfg.contains("lasso_tol")) out.lasso_tol = get_as<double>(cfg, "lasso_tol");
  if (cfg.contains("op_max_iters")) out.op.max_iters = get_as<int>(cfg, "op_max_iters");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Mask read_mask_csv(const std::string& path) {
  const Matrix values = read_matrix_csv(path);
  if (!((values.array() == 0.0) || (values.array() == 1.0)).all()) {
    throw InvalidArgument(path + ": mask entries must be 0 or 1");
  }
  return values.array() != 0.0;
}

void write_scores(const std::string& path, const std::vector<Vector>& scores) {
  require(!scores.empty(), "no scores to write");
  Matrix dump(static_cast<Index>(scores.size()), scores.front().size());
  for (std::size_t i = 0; i < scores.size(); ++i) dump.row(static_cast<Index>(i)) = scores[i];
  write_matrix_csv(path, dump);
}

// Per-command option storage, kept alive for the duration of parsing.
struct PhaseOpts {
  std::string config;
  std::string csv;
  std::string pgm;
  int threads = 0;
};

struct DetectOpts {
  std::string matrix;
  std::string mode = "acos";
  std::string config;
  std::string mask;
  std::string truth;
  std::string scores_out;
  std::optional<double> gamma;
  std::optional<Index> m;
  std::optional<Index> p;
  std::optional<double> lambda;
  std::optional<Index> k_ub;
  std::optional<std::uint64_t> seed;
  std::optional<double> energy;
};

struct SaliencyOpts {
  std::string input;
  std::string output;
  std::string mode = "sacos";
  std::string scores_out;
  double threshold = kDefaultSaliencyThreshold;
  double energy = kSaliencyEnergy;
  double gamma = 0.2;
  Index patch = 10;
  std::optional<Index> m;
  std::optional<Index> p;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
};

struct BudgetOpts {
  Index n1 = 0;
  Index n2 = 0;
  Index r = 1;
  Index k = 1;
  double delta = 0.1;
  double mu = 1.0;
  std::optional<Index> n_low_rank;
};

struct OracleOpts {
  std::string scores;
  std::string support;
};

struct GenerateOpts {
  Index n1 = 0;
  Index n2 = 0;
  Index r = 1;
  Index k = 0;
  std::uint64_t seed = 0;
  bool normalize = false;
  double noise = 0.0;
  double p_omega = 1.0;
  std::string out;
  std::string truth_out;
  std::string mask_out;
};

int cmd_phase(const PhaseOpts& o, std::ostream& out) {
  PhaseGridSpec spec = parse_phase_config(read_json_file(o.config));
  if (o.threads > 0) spec.threads = o.threads;
  const PhaseGridResult result = phase_grid(spec);
  write_text_file(o.csv, phase_grid_csv(result));
  write_text_file(o.pgm, phase_grid_pgm(result));
  out << "mode " << to_string(result.mode) << "\n";
  out << "nominal_sampling_rate " << fixed6(result.sampling_rate) << "\n";
  out << "cells " << result.cells.size() << "\n";
  out << "csv " << o.csv << "\n";
  out << "pgm " << o.pgm << "\n";
  return kExitOk;
}

int cmd_detect(const DetectOpts& o, std::ostream& out) {
  const PipelineMode mode = parse_pipeline_mode(o.mode);
  AcosConfig cfg;
  if (!o.config.empty()) {
    const json j = read_json_file(o.config);
    apply_pipeline_keys(j, cfg);
  }
  if (o.gamma) cfg.gamma = *o.gamma;
  if (o.m) cfg.m = *o.m;
  if (o.p) cfg.p = *o.p;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.k_ub) cfg.k_upper_bound = *o.k_ub;
  if (o.seed) cfg.seed = *o.seed;
  if (o.energy) cfg.energy = *o.energy;

  const Matrix data = read_matrix_csv(o.matrix);
  std::optional<Mask> mask;
  if (!o.mask.empty()) {
    mask = read_mask_csv(o.mask);
    require(mask->rows() == data.rows() && mask->cols() == data.cols(),
            "mask shape does not match the matrix");
  }
  require(mode != PipelineMode::kSacosMissing || mask.has_value(),
          "sacos_missing needs --mask");

  const PipelineResult result = run_pipeline(mode, data, cfg, mask ? &*mask : nullptr);
  out << "mode " << to_string(mode) << "\n";
  out << "declared " << format_index_list(result.support.declared) << "\n";
  out << "count " << result.support.declared.size() << "\n";
  out << "measurements " << result.measurements << "\n";
  out << "sampling_rate " << fixed6(result.sampling_rate) << "\n";
  out << "lambda " << fixed6(result.lambda) << "\n";
  out << "subspace_dim " << result.subspace_dim << "\n";
  if (mode == PipelineMode::kSacosMissing) {
    out << "unobserved_columns " << format_index_list(result.unobserved_columns) << "\n";
    out << "rank_deficient_columns " << format_index_list(result.rank_deficient_columns)
        << "\n";
  }
  if (!o.scores_out.empty()) write_scores(o.scores_out, result.path_scores);

  if (!o.truth.empty()) {
    const IndexList truth = read_index_list(o.truth);
    const bool match = truth == result.support.declared;
    out << "truth_match " << (match ? 1 : 0) << "\n";
    out << "oracle_success " << (oracle_success(result.path_scores, truth) ? 1 : 0) << "\n";
    if (!match) return kExitNegative;
  }
  return kExitOk;
}

int cmd_saliency(const SaliencyOpts& o, std::ostream& out) {
  const PipelineMode mode = parse_pipeline_mode(o.mode);
  require(mode != PipelineMode::kSacosMissing, "saliency supports acos and sacos only");
  require(o.patch >= 1, "patch size must be positive");
  const GrayImage image = read_pgm(o.input);
  const Index grid = (image.height / o.patch) * (image.width / o.patch);

  AcosConfig cfg;
  cfg.gamma = o.gamma;
  cfg.energy = o.energy;
  cfg.seed = o.seed;
  cfg.m = o.m ? *o.m : std::max<Index>(1, o.patch * o.patch / 5);
  cfg.p = o.p ? *o.p : std::max<Index>(1, grid / 5);
  if (o.lambda) cfg.lambda = *o.lambda;

  const SaliencyResult result = saliency_map(image, mode, cfg, o.threshold, o.patch);
  write_pgm(o.output, result.mask);
  if (!o.scores_out.empty()) write_scores(o.scores_out, {result.scores});
  out << "mode " << to_string(mode) << "\n";
  out << "patches " << result.scores.size() << "\n";
  out << "salient " << format_index_list(result.salient) << "\n";
  out << "count " << result.salient.size() << "\n";
  out << "sampling_rate " << fixed6(result.pipeline.sampling_rate) << "\n";
  out << "mask " << o.output << " " << result.mask.width << "x" << result.mask.height << "\n";
  return kExitOk;
}

int cmd_budget(const BudgetOpts& o, std::ostream& out) {
  SampleBudget b;
  b.n1 = o.n1;
  b.n2 = o.n2;
  b.rank = o.r;
  b.outliers = o.k;
  b.delta = o.delta;
  b.incoherence = o.mu;
  b.n_low_rank = o.n_low_rank ? *o.n_low_rank : o.n2 - o.k;
  require(b.n1 >= 1 && b.n2 >= 1, "n1 and n2 must be positive");
  require(b.n_low_rank >= 1, "need at least one low-rank column");

  const CountBound m_min = min_row_budget(b);
  const Index p_min = min_col_budget(b);
  const RateBound gamma_min = min_gamma(b);
  const Index k_max = max_outliers(b);

  out << "m_min " << m_min.value << (m_min.degenerate ? " (degenerate)" : "") << "\n";
  out << "p_min " << p_min << "\n";
  out << "gamma_min " << fixed6(gamma_min.value) << (gamma_min.infeasible ? " (infeasible)" : "")
      << "\n";
  out << "k_max " << k_max << (k_max == 0 ? " (guarantee vacuous)" : "") << "\n";
  out << "note: these are worst-case sufficient budgets. Empirically the pipelines succeed far "
         "below them; e.g. at n1=100, n2=1000, r=5, k=10, ACOS with m=30, p=300 "
         "(6.3% of entries) recovers the outliers.\n";
  return kExitOk;
}

int cmd_oracle(const OracleOpts& o, std::ostream& out) {
  const Matrix dump = read_matrix_csv(o.scores);
  const IndexList support = read_index_list(o.support);
  for (Index j : support) require(j < dump.cols(), "support index outside the score vector");
  std::vector<Vector> scores;
  for (Index i = 0; i < dump.rows(); ++i) scores.push_back(dump.row(i).transpose());
  require(!scores.empty(), "score dump is empty");
  const bool ok = oracle_success(scores, support);
  out << "success " << (ok ? 1 : 0) << "\n";
  return ok ? kExitOk : kExitNegative;
}

int cmd_generate(const GenerateOpts& o, std::ostream& out) {
  ProblemInstance inst = generate_instance(o.n1, o.n2, o.r, o.k, o.seed, o.normalize);
  if (o.noise > 0.0) inst = add_noise(std::move(inst), o.noise, derive_seed(o.seed, {2}));
  Matrix observed = inst.observed;
  if (!o.mask_out.empty()) {
    const Mask mask = bernoulli_mask(o.n1, o.n2, o.p_omega, derive_seed(o.seed, {4}));
    observed = mask.select(observed, 0.0);
    write_matrix_csv(o.mask_out, mask.cast<double>());
  }
  write_matrix_csv(o.out, observed);
  if (!o.truth_out.empty()) write_text_file(o.truth_out, format_index_list(inst.support) + "\n");
  out << "matrix " << o.out << " " << o.n1 << "x" << o.n2 << "\n";
  out << "outliers " << format_index_list(inst.support) << "\n";
  return kExitOk;
}

}  // namespace

void apply_pipeline_keys(const json& cfg, AcosConfig& out) {
  check_keys(cfg, kPipelineKeys, {});
  apply_keys(cfg, out);
}

PhaseGridSpec parse_phase_config(const json& cfg) {
  check_keys(cfg, kPipelineKeys, kGridKeys);
  require(!cfg.contains("lambda"), "phase configs take a 'lambdas' list, not 'lambda'");
  PhaseGridSpec spec;
  apply_keys(cfg, spec.config);
  if (cfg.contains("mode")) spec.mode = parse_pipeline_mode(get_as<std::string>(cfg, "mode"));
  if (cfg.contains("n1")) spec.n1 = get_as<Index>(cfg, "n1");
  if (cfg.contains("n2")) spec.n2 = get_as<Index>(cfg, "n2");
  if (cfg.contains("r_values")) spec.r_values = get_as<std::vector<Index>>(cfg, "r_values");
  if (cfg.contains("k_values")) spec.k_values = get_as<std::vector<Index>>(cfg, "k_values");
  if (cfg.contains("lambdas")) spec.lambdas = get_as<std::vector<double>>(cfg, "lambdas");
  if (cfg.contains("trials")) spec.trials = get_as<int>(cfg, "trials");
  if (cfg.contains("seed")) spec.seed = get_as<std::uint64_t>(cfg, "seed");
  if (cfg.contains("normalize")) spec.normalize = get_as<bool>(cfg, "normalize");
  if (cfg.contains("noise_sigma")) spec.noise_sigma = get_as<double>(cfg, "noise_sigma");
  if (cfg.contains("p_omega")) spec.p_omega = get_as<double>(cfg, "p_omega");
  if (cfg.contains("threads")) spec.threads = get_as<int>(cfg, "threads");
  require(!spec.r_values.empty() && !spec.k_values.empty(), "r_values and k_values are required");
  require(!spec.lambdas.empty(), "lambdas must not be empty");
  require(spec.trials >= 1, "trials must be at least 1");
  require(spec.threads >= 1, "threads must be at least 1");
  return spec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outlier-column identification from compressive measurements", "outsense"};
  app.require_subcommand(1);

  PhaseOpts phase;
  auto* sc_phase = app.add_subcommand("phase", "Run a phase-transition grid from a JSON config");
  sc_phase->add_option("config", phase.config, "JSON config")->required();
  sc_phase->add_option("--csv", phase.csv, "CSV output path")->required();
  sc_phase->add_option("--pgm", phase.pgm, "PGM heat-map output path")->required();
  sc_phase->add_option("--threads", phase.threads, "Override the config's thread count");

  DetectOpts detect;
  auto* sc_detect = app.add_subcommand("detect", "Identify outlier columns of a matrix CSV");
  sc_detect->add_option("matrix", detect.matrix, "Matrix CSV")->required();
  sc_detect->add_option("--mode", detect.mode, "acos | sacos | sacos_missing");
  sc_detect->add_option("--config", detect.config, "JSON file with pipeline keys");
  sc_detect->add_option("--mask", detect.mask, "0/1 matrix CSV of observed entries");
  sc_detect->add_option("--truth", detect.truth, "Expected outlier indices");
  sc_detect->add_option("--scores-out", detect.scores_out, "Write per-mu scores as matrix CSV");
  sc_detect->add_option("--gamma", detect.gamma);
  sc_detect->add_option("--m", detect.m);
  sc_detect->add_option("--p", detect.p);
  sc_detect->add_option("--lambda", detect.lambda);
  sc_detect->add_option("--k-ub", detect.k_ub, "Upper bound on the outlier count");
  sc_detect->add_option("--seed", detect.seed);
  sc_detect->add_option("--energy", detect.energy);

  SaliencyOpts sal;
  auto* sc_sal = app.add_subcommand("saliency", "Patch saliency mask of a P5 PGM image");
  sc_sal->add_option("input", sal.input, "Input image (binary PGM)")->required();
  sc_sal->add_option("output", sal.output, "Output mask (binary PGM)")->required();
  sc_sal->add_option("--mode", sal.mode, "acos | sacos");
  sc_sal->add_option("--threshold", sal.threshold, "Fraction of the maximum score");
  sc_sal->add_option("--energy", sal.energy);
  sc_sal->add_option("--gamma", sal.gamma);
  sc_sal->add_option("--patch", sal.patch);
  sc_sal->add_option("--m", sal.m, "Rows of the sketch (default patch^2 / 5)");
  sc_sal->add_option("--p", sal.p, "ACOS second-step measurements (default patches / 5)");
  sc_sal->add_option("--lambda", sal.lambda);
  sc_sal->add_option("--seed", sal.seed);
  sc_sal->add_option("--scores-out", sal.scores_out);

  BudgetOpts budget;
  auto* sc_budget = app.add_subcommand("budget", "Sufficient sampling budgets");
  sc_budget->add_option("--n1", budget.n1)->required();
  sc_budget->add_option("--n2", budget.n2)->required();
  sc_budget->add_option("--r", budget.r)->required();
  sc_budget->add_option("--k", budget.k)->required();
  sc_budget->add_option("--delta", budget.delta);
  sc_budget->add_option("--mu", budget.mu, "Column incoherence");
  sc_budget->add_option("--n-low-rank", budget.n_low_rank, "Default n2 - k");

  OracleOpts oracle;
  auto* sc_oracle = app.add_subcommand("oracle", "Score a stored score dump against a support");
  sc_oracle->add_option("scores", oracle.scores, "Matrix CSV, one score vector per row")
      ->required();
  sc_oracle->add_option("support", oracle.support, "Outlier indices")->required();

  GenerateOpts gen;
  auto* sc_gen = app.add_subcommand("generate", "Write a synthetic instance");
  sc_gen->add_option("--n1", gen.n1)->required();
  sc_gen->add_option("--n2", gen.n2)->required();
  sc_gen->add_option("--r", gen.r)->required();
  sc_gen->add_option("--k", gen.k)->required();
  sc_gen->add_option("--seed", gen.seed);
  sc_gen->add_flag("--normalize", gen.normalize);
  sc_gen->add_option("--noise", gen.noise);
  sc_gen->add_option("--p-omega", gen.p_omega);
  sc_gen->add_option("--out", gen.out)->required();
  sc_gen->add_option("--truth-out", gen.truth_out);
  sc_gen->add_option("--mask-out", gen.mask_out);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (*sc_phase) return cmd_phase(phase, out);
    if (*sc_detect) return cmd_detect(detect, out);
    if (*sc_sal) return cmd_saliency(sal, out);
    if (*sc_budget) return cmd_budget(budget, out);
    if (*sc_oracle) return cmd_oracle(oracle, out);
    if (*sc_gen) return cmd_generate(gen, out);
  } catch (const SolverDiverged& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const NumericalError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace outsense::cli
