// SPDX-License-Identifier: Apache-2.0
#include "nd/synth.hpp"

#include <cmath>

#include "nd/rng.hpp"

namespace nd {

PlanarScene generate_planar_scene(const PlanarSceneSpec& spec) {
  spec.intrinsics.validate();
  if (spec.planes.empty()) {
    throw ParameterError("generate_planar_scene: no planes in spec");
  }
  if (spec.noise_sigma < 0.0) {
    throw ParameterError("generate_planar_scene: negative noise sigma");
  }
  const int w = spec.intrinsics.width;
  const int h = spec.intrinsics.height;

  PlanarScene scene;
  scene.depth = DepthMap(w, h);
  scene.normals = NormalMap(w, h);
  scene.distances = DistanceMap(w, h);
  scene.labels = SegmentLabelMap(w, h);
  scene.labels.segment_areas.assign(spec.planes.size(), 0);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      int owner = -1;
      for (size_t i = 0; i < spec.planes.size(); ++i) {
        if (region_contains(spec.planes[i].region, u, v)) {
          owner = static_cast<int>(i);
          break;
        }
      }
      if (owner < 0) {
        throw DomainError("generate_planar_scene: pixel (" +
                          std::to_string(u) + ", " + std::to_string(v) +
                          ") is covered by no plane region");
      }
      const ScenePlane& plane = spec.planes[owner];

      // Closed-form ray-plane intersection: P = t * ray, N . P = dist.
      const Eigen::Vector3d ray = spec.intrinsics.ray(u, v);
      const double denom = plane.normal.dot(ray);
      const double depth = plane.distance / denom;
      if (!(depth > 0.0) || !std::isfinite(depth)) {
        throw DomainError("generate_planar_scene: plane " +
                          std::to_string(owner) +
                          " yields non-positive or non-finite depth at (" +
                          std::to_string(u) + ", " + std::to_string(v) + ")");
      }

      scene.depth.set(u, v, depth);
      scene.normals.set(u, v, plane.normal);
      scene.distances.set(u, v, plane.distance);
      scene.labels.labels.at(u, v) = owner;
      ++scene.labels.segment_areas[owner];
    }
  }

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int32_t label = scene.labels.labels.at(u, v);
      scene.labels.planar_mask.at(u, v) =
          scene.labels.segment_areas[label] > spec.planar_min_area ? 1 : 0;
    }
  }

  if (spec.noise_sigma > 0.0) {
    Rng rng(spec.seed);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const double noisy =
            scene.depth.values.at(u, v) + spec.noise_sigma * rng.normal();
        if (noisy > 0.0) {
          scene.depth.values.at(u, v) = noisy;
        } else {
          scene.depth.set_invalid(u, v);
        }
      }
    }
  }
  return scene;
}

}  // namespace nd
