// SPDX-License-Identifier: Apache-2.0
#include "nd/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace nd {

namespace {

void require_map_matches_camera(int w, int h, const CameraIntrinsics& K,
                                const char* what) {
  detail::require_same_shape(w, h, K.width, K.height, what);
}

}  // namespace

PointCloud backproject(const DepthMap& depth, const CameraIntrinsics& K) {
  require_map_matches_camera(depth.width(), depth.height(), K,
                             "backproject: depth vs intrinsics");
  PointCloud cloud;
  cloud.points.reserve(static_cast<size_t>(depth.valid_count()));
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.is_valid(u, v)) continue;
      const double d = depth.values.at(u, v);
      cloud.points.emplace_back(K.ray(u, v) * d);
    }
  }
  return cloud;
}

DepthMap depth_from_normal_distance(const NormalMap& normals,
                                    const DistanceMap& distances,
                                    const CameraIntrinsics& K) {
  detail::require_same_shape(normals.width(), normals.height(),
                             distances.width(), distances.height(),
                             "depth_from_normal_distance: normals vs distances");
  require_map_matches_camera(normals.width(), normals.height(), K,
                             "depth_from_normal_distance: maps vs intrinsics");
  DepthMap depth(normals.width(), normals.height());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!normals.is_valid(u, v) || !distances.is_valid(u, v)) continue;
      const double denom = normals.vectors.at(u, v).dot(K.ray(u, v));
      if (std::abs(denom) < kDenominatorEpsilon) continue;
      const double d = distances.values.at(u, v) / denom;
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      depth.set(u, v, d);
    }
  }
  return depth;
}

DistanceMap distance_from_depth_normal(const DepthMap& depth,
                                       const NormalMap& normals,
                                       const CameraIntrinsics& K) {
  detail::require_same_shape(depth.width(), depth.height(), normals.width(),
                             normals.height(),
                             "distance_from_depth_normal: depth vs normals");
  require_map_matches_camera(depth.width(), depth.height(), K,
                             "distance_from_depth_normal: maps vs intrinsics");
  DistanceMap dist(depth.width(), depth.height());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.is_valid(u, v) || !normals.is_valid(u, v)) continue;
      const double d =
          depth.values.at(u, v) * normals.vectors.at(u, v).dot(K.ray(u, v));
      // Orientation convention keeps the plane-to-origin distance >= 0.
      dist.set(u, v, std::abs(d));
    }
  }
  return dist;
}

NormalMap normals_from_depth(const DepthMap& depth, const CameraIntrinsics& K,
                             int window) {
  if (window <= 0 || window % 2 == 0) {
    throw ParameterError("normals_from_depth: window must be odd and positive");
  }
  require_map_matches_camera(depth.width(), depth.height(), K,
                             "normals_from_depth: depth vs intrinsics");
  const int radius = window / 2;
  NormalMap normals(depth.width(), depth.height());

  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<size_t>(window) * window);
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.is_valid(u, v)) continue;
      const double d_center = depth.values.at(u, v);

      pts.clear();
      for (int dv = -radius; dv <= radius; ++dv) {
        for (int du = -radius; du <= radius; ++du) {
          const int qu = u + du;
          const int qv = v + dv;
          if (!depth.valid.in_bounds(qu, qv) || !depth.is_valid(qu, qv)) {
            continue;
          }
          const double d = depth.values.at(qu, qv);
          if (std::abs(d - d_center) > kDepthDiscontinuityRatio * d_center) {
            continue;
          }
          pts.emplace_back(K.ray(qu, qv) * d);
        }
      }
      const auto fitted = fit_plane_normal(pts);
      if (!fitted) continue;
      Eigen::Vector3d n = *fitted;

      // Orient so the plane-to-origin distance at the center is non-negative.
      const Eigen::Vector3d center_point = K.ray(u, v) * d_center;
      if (n.dot(center_point) < 0.0) n = -n;
      normals.set(u, v, n);
    }
  }
  return normals;
}

std::optional<Eigen::Vector3d> fit_plane_normal(
    const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3) return std::nullopt;

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - centroid;
    cov += q * q.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d& eigenvalues = solver.eigenvalues();
  // Near-collinear point sets leave the normal direction ambiguous.
  if (!(eigenvalues[1] > 1e-10 * eigenvalues[2])) return std::nullopt;
  Eigen::Vector3d n = solver.eigenvectors().col(0);  // smallest eigenvalue
  const double norm = n.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  return n / norm;
}

}  // namespace nd
