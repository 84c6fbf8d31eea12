#pragma once

#include "outsense/image.hpp"
#include "outsense/pipeline.hpp"

namespace outsense {

inline constexpr double kDefaultSaliencyThreshold = 0.25;
inline constexpr double kSaliencyEnergy = 0.95;

struct SaliencyResult {
  GrayImage mask;  // covered region; 255 on salient patches, 0 elsewhere
  Vector scores;   // per patch
  IndexList salient;
  PipelineResult pipeline;
};

// Runs ACOS or SACOS on the patch matrix and marks patches whose score
// exceeds threshold_fraction * max score. Scores at or below the pipeline's
// zero floor never count, so a flat image gives an empty mask.
// Patch columns of a flat background are near copies, and outlier pursuit on
// s such columns keeps them low-rank only for lambda > 1/sqrt(s). This sizes
// the usual 3/(7 sqrt(0.1 n)) heuristic on the Step-1 column count
// s = round(gamma * patches) instead of on all patches.
double saliency_lambda(Index patches, double gamma);

// Uses saliency_lambda when cfg carries neither lambda nor k_upper_bound.
SaliencyResult saliency_map(const GrayImage& image, PipelineMode mode, const AcosConfig& cfg,
                            double threshold_fraction = kDefaultSaliencyThreshold,
                            Index patch = 10);

}  // namespace outsense
