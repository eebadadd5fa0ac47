// SPDX-License-Identifier: Apache-2.0
#ifndef ND_TYPES_HPP_
#define ND_TYPES_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nd/errors.hpp"

namespace nd {

/// Dense row-major 2D grid. Pixel access is (u, v) = (column, row).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {
    if (width < 0 || height < 0) {
      throw ParameterError("Grid dimensions must be non-negative");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int u, int v) { return data_[index(u, v)]; }
  const T& at(int u, int v) const { return data_[index(u, v)]; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width_ && v >= 0 && v < height_;
  }

  size_t index(int u, int v) const {
    return static_cast<size_t>(v) * width_ + u;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<uint8_t>;

/// Scalar per-pixel map with a validity mask. Invalid pixels hold value 0.
/// The tag parameter makes depth, distance and uncertainty distinct types.
template <typename Tag>
struct ScalarMap {
  Grid<double> values;
  Mask valid;

  ScalarMap() = default;
  ScalarMap(int width, int height)
      : values(width, height, 0.0), valid(width, height, 0) {}

  int width() const { return values.width(); }
  int height() const { return values.height(); }

  bool is_valid(int u, int v) const { return valid.at(u, v) != 0; }

  void set(int u, int v, double value) {
    values.at(u, v) = value;
    valid.at(u, v) = 1;
  }
  void set_invalid(int u, int v) {
    values.at(u, v) = 0.0;
    valid.at(u, v) = 0;
  }

  bool same_shape(int w, int h) const { return width() == w && height() == h; }
  template <typename OtherTag>
  bool same_shape(const ScalarMap<OtherTag>& o) const {
    return values.same_shape(o.values);
  }

  long long valid_count() const {
    long long n = 0;
    for (uint8_t m : valid.data()) n += (m != 0);
    return n;
  }
};

using DepthMap = ScalarMap<struct DepthTag>;
using DistanceMap = ScalarMap<struct DistanceTag>;
using UncertaintyMap = ScalarMap<struct UncertaintyTag>;
/// Generic masked scalar grid (difference maps, deltas, ...).
using ValueMap = ScalarMap<struct ValueTag>;

/// Per-pixel unit surface normals with a validity mask.
struct NormalMap {
  Grid<Eigen::Vector3d> vectors;
  Mask valid;

  NormalMap() = default;
  NormalMap(int width, int height)
      : vectors(width, height, Eigen::Vector3d::Zero()),
        valid(width, height, 0) {}

  int width() const { return vectors.width(); }
  int height() const { return vectors.height(); }

  bool is_valid(int u, int v) const { return valid.at(u, v) != 0; }

  void set(int u, int v, const Eigen::Vector3d& n) {
    vectors.at(u, v) = n;
    valid.at(u, v) = 1;
  }
  void set_invalid(int u, int v) {
    vectors.at(u, v).setZero();
    valid.at(u, v) = 0;
  }

  template <typename T>
  bool same_shape(const T& o) const {
    return width() == o.width() && height() == o.height();
  }

  long long valid_count() const {
    long long n = 0;
    for (uint8_t m : valid.data()) n += (m != 0);
    return n;
  }
};

/// Unordered 3D point set with optional per-point normals and colors.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;          // empty or same length
  std::vector<std::array<uint8_t, 3>> colors;    // empty or same length
};

/// Multi-channel planar grid, laid out [channel][row][column].
struct Volume {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Volume() = default;
  Volume(int channels_, int width_, int height_, double fill = 0.0)
      : channels(channels_), height(height_), width(width_),
        data(static_cast<size_t>(channels_) * height_ * width_, fill) {}

  double& at(int c, int u, int v) { return data[index(c, u, v)]; }
  double at(int c, int u, int v) const { return data[index(c, u, v)]; }

  size_t index(int c, int u, int v) const {
    return (static_cast<size_t>(c) * height + v) * width + u;
  }

  bool same_shape(const Volume& o) const {
    return channels == o.channels && width == o.width && height == o.height;
  }
};

namespace detail {

inline void require_same_shape(int wa, int ha, int wb, int hb,
                               const char* what) {
  if (wa != wb || ha != hb) {
    throw ShapeError(std::string(what) + ": got " + std::to_string(wa) + "x" +
                     std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                     std::to_string(hb));
  }
}

}  // namespace detail

}  // namespace nd

#endif  // ND_TYPES_HPP_
