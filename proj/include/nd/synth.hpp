// SPDX-License-Identifier: Apache-2.0
#ifndef ND_SYNTH_HPP_
#define ND_SYNTH_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nd/camera.hpp"
#include "nd/plane_seg.hpp"
#include "nd/types.hpp"

namespace nd {

/// Axis-aligned pixel rectangle [x0, x1) x [y0, y1).
struct RegionRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool contains(int u, int v) const {
    return u >= x0 && u < x1 && v >= y0 && v < y1;
  }
};

/// Half-plane in pixel coordinates: a*u + b*v + c >= 0.
struct RegionHalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  bool contains(int u, int v) const { return a * u + b * v + c >= 0.0; }
};

using RegionPredicate = std::variant<RegionRect, RegionHalfPlane>;

inline bool region_contains(const RegionPredicate& region, int u, int v) {
  return std::visit([&](const auto& r) { return r.contains(u, v); }, region);
}

/// One plane of a synthetic scene: unit normal, plane-to-origin distance and
/// the pixel region it covers. Regions are evaluated in order; the first
/// matching plane claims the pixel, so ordered predicates partition the image.
struct ScenePlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double distance = 1.0;
  RegionPredicate region = RegionRect{};
};

struct PlanarSceneSpec {
  std::vector<ScenePlane> planes;
  CameraIntrinsics intrinsics;
  double noise_sigma = 0.0;   // Gaussian depth noise, meters
  uint64_t seed = 0;
  /// Segment area threshold used to populate the returned planar mask;
  /// 0 marks every generated region as planar.
  int planar_min_area = 0;
};

struct PlanarScene {
  DepthMap depth;          // noisy if noise_sigma > 0
  NormalMap normals;       // exact ground truth
  DistanceMap distances;   // exact ground truth
  SegmentLabelMap labels;  // one segment per plane, in spec order
};

/// Renders the exact piece-wise planar ground truth for `spec`. Depth is
/// computed by closed-form ray-plane intersection; Gaussian noise (if any) is
/// added to the depth map only, deterministically from the seed. Throws
/// DomainError naming the plane if any pixel of its region has non-positive
/// or non-finite depth.
PlanarScene generate_planar_scene(const PlanarSceneSpec& spec);

}  // namespace nd

#endif  // ND_SYNTH_HPP_
