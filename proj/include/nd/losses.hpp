// SPDX-License-Identifier: Apache-2.0
#ifndef ND_LOSSES_HPP_
#define ND_LOSSES_HPP_

#include <string>
#include <utility>
#include <vector>

#include "nd/plane_seg.hpp"
#include "nd/types.hpp"

namespace nd {

/// Training-objective constants. Defaults are the published settings.
struct LossWeights {
  double lambda_depth = 1.0;
  double lambda_normal = 5.0;
  double lambda_distance = 0.25;
  double lambda_uncertainty = 1.0;
  double lambda_plane_consistency = 0.01;
  double gamma = 0.85;      // per-iteration decay
  int max_iterations = 3;   // m
  double kappa = 10.0;      // SILog scale
  double eta = 0.85;        // SILog variance focus
  double uncertainty_b = 0.2;  // Laplace error tolerance, meters

  void validate() const;
};

struct LossTerms {
  double depth = 0.0;
  double normal = 0.0;
  double distance = 0.0;
  double uncertainty = 0.0;
  double plane_consistency = 0.0;
  long long valid_count = 0;
};

struct LossReport {
  LossTerms terms;
  double total = 0.0;

  std::string to_json() const;
};

/// Sum over masked pixels of the L1 norms of the forward-difference gradients
/// of the normal and distance maps. Differences that cross segment
/// boundaries, leave the image, or touch invalid pixels contribute 0.
/// Unnormalized (no 1/|T|).
double plane_consistency_loss(const NormalMap& normals,
                              const DistanceMap& distances,
                              const SegmentLabelMap& segments);

/// Iteration-decayed two-head scaled scale-invariant log loss:
/// sum_t gamma^(m - t) * [silog(D1_t) + silog(D2_t)] with
/// silog(D) = kappa * sqrt(mean(g^2) - eta * mean(g)^2), g = ln D - ln gt.
/// The sequence holds iterations 1..len; when include_iteration_zero is set
/// the first element is treated as iteration 0 instead.
double silog_depth_loss(
    const std::vector<std::pair<DepthMap, DepthMap>>& pred_sequence,
    const DepthMap& gt, const LossWeights& w,
    bool include_iteration_zero = false);

/// Mean over jointly valid pixels of |e| + e^2.
double l1l2_depth_loss(const DepthMap& pred, const DepthMap& gt);

/// Mean over jointly valid pixels of 1 - N . N_gt.
double normal_cosine_loss(const NormalMap& pred, const NormalMap& gt);

/// Mean absolute plane-distance difference over jointly valid pixels.
double distance_l1_loss(const DistanceMap& pred, const DistanceMap& gt);

/// Laplace uncertainty target U = 1 - exp(-|pred - gt| / b), in [0, 1).
UncertaintyMap uncertainty_target(const DepthMap& pred, const DepthMap& gt,
                                  double b);

/// Unnormalized sum of the two heads' L1 uncertainty errors.
double uncertainty_loss(const UncertaintyMap& u1, const UncertaintyMap& u2,
                        const UncertaintyMap& u1_gt,
                        const UncertaintyMap& u2_gt);

/// Weighted combination of the five loss terms.
LossReport overall_loss(const LossTerms& terms, const LossWeights& w);

}  // namespace nd

#endif  // ND_LOSSES_HPP_
