// SPDX-License-Identifier: Apache-2.0
#ifndef ND_CAMERA_HPP_
#define ND_CAMERA_HPP_

#include <Eigen/Core>
#include <string>

#include "nd/errors.hpp"

namespace nd {

/// Pinhole camera model. Focal lengths and principal point in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int width_,
                   int height_)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
    validate();
  }

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw ParameterError("intrinsics: focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
      throw ParameterError("intrinsics: image dimensions must be at least 1");
    }
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
      throw ParameterError("intrinsics: principal point outside the image");
    }
  }

  /// Backprojection ray K^-1 * (u, v, 1); z component is always 1.
  Eigen::Vector3d ray(double u, double v) const {
    return {(u - cx) / fx, (v - cy) / fy, 1.0};
  }

  /// Projection of a camera-space point back to pixel coordinates.
  Eigen::Vector2d project(const Eigen::Vector3d& p) const {
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
  }
};

}  // namespace nd

#endif  // ND_CAMERA_HPP_
