// SPDX-License-Identifier: Apache-2.0
#ifndef ND_COMPLETION_HPP_
#define ND_COMPLETION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nd/camera.hpp"
#include "nd/plane_seg.hpp"
#include "nd/types.hpp"

namespace nd {

/// Validity-masked sparse observations sharing one set of sampled pixels.
/// Normal/distance validity is a subset of depth validity.
struct SparseSamples {
  DepthMap depth;
  NormalMap normal;
  DistanceMap distance;
  long long sample_count = 0;
};

/// Configuration of the propagation stage of complete_depth.
struct SpnConfig {
  std::vector<std::array<int, 2>> offsets;  // empty = 8-neighborhood
  double alpha = 0.1;     // in-segment neighbor weight
  double sigma_px = 16.0;  // distance-to-sample uncertainty scale
  int iterations = 6;
};

/// Draws n valid pixel locations uniformly without replacement
/// (deterministic for a given seed) and copies depth/normal/distance values
/// at those locations.
SparseSamples sample_sparse(const DepthMap& dense_depth,
                            const NormalMap& dense_normal,
                            const DistanceMap& dense_dist, long long n,
                            uint64_t seed);

/// Estimates sparse normals and plane distances from a sparse depth map:
/// least-squares plane fit over valid sparse points in `window` around each
/// sample, falling back to the 9 nearest valid points when the window holds
/// fewer than 3; distance via dist = D * (N . K^-1 p~) at sampled pixels.
std::pair<NormalMap, DistanceMap> sparse_nd_from_sparse_depth(
    const DepthMap& sparse_depth, const CameraIntrinsics& K, int window);

/// Fills each segment with the renormalized mean of its sampled normals and
/// the mean of its sampled distances; segments without samples copy the
/// nearest sampled pixel (Euclidean in image space, row-major tie-break).
/// Output is valid exactly on labeled pixels.
std::pair<NormalMap, DistanceMap> planar_fill(const SparseSamples& samples,
                                              const SegmentLabelMap& labels);

/// Piece-wise planar depth completion: planar_fill, depth from the
/// normal-distance constraint, and optional spatial-propagation refinement
/// with segment-aware affinities and distance-to-sample uncertainty.
DepthMap complete_depth(const SparseSamples& samples,
                        const SegmentLabelMap& labels,
                        const CameraIntrinsics& K,
                        const std::optional<SpnConfig>& refine_cfg = {});

/// Extends a partial labeling to full coverage: every unlabeled pixel takes
/// the label of the nearest labeled pixel (Euclidean, row-major tie-break).
SegmentLabelMap densify_labels_nearest(const SegmentLabelMap& labels);

}  // namespace nd

#endif  // ND_COMPLETION_HPP_
