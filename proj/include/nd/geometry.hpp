// SPDX-License-Identifier: Apache-2.0
#ifndef ND_GEOMETRY_HPP_
#define ND_GEOMETRY_HPP_

#include <optional>
#include <vector>

#include "nd/camera.hpp"
#include "nd/types.hpp"

namespace nd {

/// Denominator cutoff for depth-from-plane conversion; rays closer than this
/// to parallel with the plane give no finite depth and become invalid.
inline constexpr double kDenominatorEpsilon = 1e-6;

/// Relative depth gap above which a window point is excluded from the local
/// plane fit (treated as belonging to a different surface).
inline constexpr double kDepthDiscontinuityRatio = 0.05;

/// Backprojects every valid depth pixel to a camera-space 3D point,
/// row-major over valid pixels.
PointCloud backproject(const DepthMap& depth, const CameraIntrinsics& K);

/// Converts plane parameters (unit normal, plane-to-origin distance) to depth
/// via D = dist / (N . K^-1 p~). Pixels whose ray is near-parallel to the
/// plane, or whose resulting depth is non-positive or non-finite, are invalid.
DepthMap depth_from_normal_distance(const NormalMap& normals,
                                    const DistanceMap& distances,
                                    const CameraIntrinsics& K);

/// Recovers plane-to-origin distance from depth and normals,
/// dist = D * (N . K^-1 p~). Negative products are flipped to keep the
/// distance map non-negative (normals oriented so N . P >= 0).
DistanceMap distance_from_depth_normal(const DepthMap& depth,
                                       const NormalMap& normals,
                                       const CameraIntrinsics& K);

/// Estimates surface normals by least-squares plane fits over backprojected
/// points in an odd `window` around each pixel. Window points whose depth
/// differs from the center by more than kDepthDiscontinuityRatio (relative)
/// are excluded; pixels with fewer than 3 usable points are invalid. Normals
/// are oriented so that N . P >= 0 at the center point.
NormalMap normals_from_depth(const DepthMap& depth, const CameraIntrinsics& K,
                             int window);

/// Least-squares plane normal (unit, unoriented) of a point set: smallest
/// eigenvector of the centroid-subtracted covariance. nullopt for fewer than
/// 3 points or a degenerate solve.
std::optional<Eigen::Vector3d> fit_plane_normal(
    const std::vector<Eigen::Vector3d>& points);

}  // namespace nd

#endif  // ND_GEOMETRY_HPP_
