// SPDX-License-Identifier: Apache-2.0
#ifndef ND_PLANE_SEG_HPP_
#define ND_PLANE_SEG_HPP_

#include <cstdint>
#include <vector>

#include "nd/types.hpp"

namespace nd {

/// Label value for pixels excluded from segmentation (invalid inputs).
inline constexpr int32_t kUnlabeled = -1;

struct GraphEdge {
  int32_t a = 0;  // smaller pixel index, row-major
  int32_t b = 0;  // larger pixel index
  double weight = 0.0;
};

/// Undirected weighted graph over the 8-connected pixel grid. Only pixels
/// marked valid participate; edges touching invalid pixels are omitted.
struct EdgeWeightGraph {
  int width = 0;
  int height = 0;
  std::vector<GraphEdge> edges;
  Mask valid;  // vertices eligible for labeling

  EdgeWeightGraph() = default;
  EdgeWeightGraph(int width_, int height_)
      : width(width_), height(height_), valid(width_, height_, 1) {}
};

/// Per-pixel segment labels. Ids are contiguous from 0 in first-appearance
/// row-major order; invalid pixels carry kUnlabeled.
struct SegmentLabelMap {
  Grid<int32_t> labels;
  std::vector<int64_t> segment_areas;  // indexed by segment id
  Mask planar_mask;

  SegmentLabelMap() = default;
  SegmentLabelMap(int width, int height)
      : labels(width, height, kUnlabeled), planar_mask(width, height, 0) {}

  int width() const { return labels.width(); }
  int height() const { return labels.height(); }
  int segment_count() const { return static_cast<int>(segment_areas.size()); }
};

/// Builds the geometric-dissimilarity graph: per 8-neighbor edge, the
/// Euclidean distance of the two normals and the absolute difference of the
/// two plane distances, each min-max normalized over all edges of the image,
/// summed into a weight in [0, 2]. A constant channel (max == min) normalizes
/// to 0.
EdgeWeightGraph geometric_dissimilarity(const NormalMap& normals,
                                        const DistanceMap& distances);

/// Felzenszwalb graph segmentation: edges ascending by weight, components
/// merged when the edge weight does not exceed either side's internal
/// difference + k/area; a post-pass merges components smaller than min_size
/// across their lightest connecting edge. Ties are broken by
/// (weight, a, b) so labelings are deterministic.
SegmentLabelMap felzenszwalb_segment(const EdgeWeightGraph& graph, double k,
                                     int min_size);

/// Populates the planar mask: true exactly on pixels whose segment area is
/// strictly greater than min_area.
SegmentLabelMap planar_mask(SegmentLabelMap labels, int64_t min_area);

}  // namespace nd

#endif  // ND_PLANE_SEG_HPP_
