#include "outsense/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "outsense/error.hpp"
#include "outsense/op_solver.hpp"

namespace outsense {

double saliency_lambda(Index patches, double gamma) {
  require(patches >= 1, "saliency needs at least one patch");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  const auto sampled = static_cast<Index>(std::llround(gamma * static_cast<double>(patches)));
  return heuristic_lambda(std::max<Index>(1, sampled));
}

SaliencyResult saliency_map(const GrayImage& image, PipelineMode mode, const AcosConfig& cfg,
                            double threshold_fraction, Index patch) {
  require(mode == PipelineMode::kAcos || mode == PipelineMode::kSacos,
          "saliency maps use the acos or sacos pipeline");
  require(threshold_fraction >= 0.0 && threshold_fraction <= 1.0,
          "saliency threshold must be a fraction in [0, 1]");
  const PatchGrid grid = patch_matrix(image, patch);

  SaliencyResult out;
  AcosConfig run_cfg = cfg;
  if (!run_cfg.lambda && !run_cfg.k_upper_bound) {
    run_cfg.lambda = saliency_lambda(grid.patch_count(), cfg.gamma);
  }
  out.pipeline = run_pipeline(mode, grid.matrix, run_cfg);
  out.scores = out.pipeline.support.scores;
  const double top = out.scores.size() > 0 ? out.scores.maxCoeff() : 0.0;
  const SupportEstimate est = extract_support(
      out.scores,
      SupportRuleSpec::fixed(threshold_fraction * top, out.pipeline.support.rule.zero_floor));
  out.salient = est.declared;

  out.mask = GrayImage::filled(grid.grid_rows * patch, grid.grid_cols * patch, 0);
  for (Index col : out.salient) {
    const Index pr = col / grid.grid_cols;
    const Index pc = col % grid.grid_cols;
    for (Index dy = 0; dy < patch; ++dy) {
      for (Index dx = 0; dx < patch; ++dx) out.mask.at(pr * patch + dy, pc * patch + dx) = 255;
    }
  }
  return out;
}

}  // namespace outsense
