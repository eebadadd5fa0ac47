// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nd/geometry.hpp"
#include "nd/synth.hpp"
#include "test_util.hpp"

using namespace nd;
using namespace nd::testing;

TEST_CASE("backproject principal-point ray is the optical axis") {
  const CameraIntrinsics K(100.0, 100.0, 2.0, 2.0, 5, 5);
  DepthMap depth(5, 5);
  depth.set(2, 2, 1.0);
  const auto cloud = backproject(depth, K);
  REQUIRE(cloud.points.size() == 1);
  CHECK(cloud.points[0] == Eigen::Vector3d(0.0, 0.0, 1.0));
}

TEST_CASE("backproject pixel one focal length off axis") {
  const CameraIntrinsics K(2.0, 2.0, 1.0, 1.0, 4, 3);
  DepthMap depth(4, 3);
  depth.set(3, 1, 2.0);  // u = cx + fx
  const auto cloud = backproject(depth, K);
  REQUIRE(cloud.points.size() == 1);
  CHECK(cloud.points[0] == Eigen::Vector3d(2.0, 0.0, 2.0));
}

TEST_CASE("backproject skips invalid pixels, row-major order") {
  const CameraIntrinsics K(10.0, 10.0, 0.5, 0.5, 2, 2);
  DepthMap depth(2, 2);
  depth.set(0, 0, 1.0);
  depth.set(1, 0, 2.0);
  depth.set(0, 1, 3.0);
  // (1, 1) left invalid
  const auto cloud = backproject(depth, K);
  REQUIRE(cloud.points.size() == 3);
  CHECK(cloud.points[0].z() == 1.0);
  CHECK(cloud.points[1].z() == 2.0);
  CHECK(cloud.points[2].z() == 3.0);
}

TEST_CASE("backproject shape mismatch") {
  const CameraIntrinsics K(10.0, 10.0, 1.0, 1.0, 4, 4);
  DepthMap depth(3, 4);
  CHECK_THROWS_AS(backproject(depth, K), ShapeError);
}

TEST_CASE("backproject then reproject recovers pixel coordinates") {
  const auto K = simple_intrinsics(17, 13);
  const auto spec = random_scene_spec(7, 3, K, 0.0, 4);
  const auto scene = generate_planar_scene(spec);
  const auto cloud = backproject(scene.depth, K);
  size_t i = 0;
  for (int v = 0; v < 13; ++v) {
    for (int u = 0; u < 17; ++u) {
      if (!scene.depth.is_valid(u, v)) continue;
      const auto uv = K.project(cloud.points[i++]);
      CHECK(std::abs(uv.x() - u) < 1e-9);
      CHECK(std::abs(uv.y() - v) < 1e-9);
    }
  }
  CHECK(i == cloud.points.size());
}

TEST_CASE("backproject scales exactly with power-of-two depth scaling") {
  const auto K = simple_intrinsics(9, 7);
  auto depth = constant_depth(9, 7, 1.375);
  const auto cloud = backproject(depth, K);
  for (auto& value : depth.values.data()) value *= 2.0;
  const auto scaled = backproject(depth, K);
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    CHECK(scaled.points[i] == 2.0 * cloud.points[i]);
  }
}

TEST_CASE("depth from fronto-parallel plane is the plane distance") {
  const auto K = simple_intrinsics(8, 6);
  const auto normals = constant_normals(8, 6, {0.0, 0.0, 1.0});
  const auto distances = constant_distances(8, 6, 2.0);
  const auto depth = depth_from_normal_distance(normals, distances, K);
  for (int v = 0; v < 6; ++v) {
    for (int u = 0; u < 8; ++u) {
      REQUIRE(depth.is_valid(u, v));
      CHECK(depth.values.at(u, v) == 2.0);
    }
  }
}

TEST_CASE("depth from tilted plane matches ray-plane intersection") {
  const auto K = simple_intrinsics(32, 24);
  const auto spec = random_scene_spec(11, 4, K, 0.0, 6);
  const auto scene = generate_planar_scene(spec);
  const auto depth = depth_from_normal_distance(scene.normals,
                                                scene.distances, K);
  for (int v = 0; v < 24; ++v) {
    for (int u = 0; u < 32; ++u) {
      REQUIRE(depth.is_valid(u, v));
      const double rel = std::abs(depth.values.at(u, v) -
                                  scene.depth.values.at(u, v)) /
                         scene.depth.values.at(u, v);
      CHECK(rel <= 1e-9);
    }
  }
}

TEST_CASE("ray parallel to plane is invalid") {
  const CameraIntrinsics K(100.0, 100.0, 2.0, 2.0, 5, 5);
  const auto normals = constant_normals(5, 5, {1.0, 0.0, 0.0});
  const auto distances = constant_distances(5, 5, 1.0);
  const auto depth = depth_from_normal_distance(normals, distances, K);
  CHECK(!depth.is_valid(2, 2));  // K^-1 p~ = (0, 0, 1), denominator 0
}

TEST_CASE("depth conversion propagates joint validity") {
  const auto K = simple_intrinsics(3, 3);
  auto normals = constant_normals(3, 3, {0.0, 0.0, 1.0});
  auto distances = constant_distances(3, 3, 1.0);
  normals.set_invalid(1, 1);
  distances.set_invalid(2, 0);
  const auto depth = depth_from_normal_distance(normals, distances, K);
  CHECK(!depth.is_valid(1, 1));
  CHECK(!depth.is_valid(2, 0));
  CHECK(depth.is_valid(0, 0));
}

TEST_CASE("distance at principal point equals depth for fronto plane") {
  const CameraIntrinsics K(100.0, 100.0, 2.0, 2.0, 5, 5);
  DepthMap depth(5, 5);
  depth.set(2, 2, 2.0);
  const auto normals = constant_normals(5, 5, {0.0, 0.0, 1.0});
  const auto dist = distance_from_depth_normal(depth, normals, K);
  REQUIRE(dist.is_valid(2, 2));
  CHECK(dist.values.at(2, 2) == 2.0);
  CHECK(!dist.is_valid(0, 0));  // invalid depth propagates
}

TEST_CASE("depth -> distance -> depth round trip on planar scenes") {
  const auto K = simple_intrinsics(32, 24);
  const auto spec = random_scene_spec(3, 3, K, 0.0, 6);
  const auto scene = generate_planar_scene(spec);
  const auto dist =
      distance_from_depth_normal(scene.depth, scene.normals, K);
  for (int v = 0; v < 24; ++v) {
    for (int u = 0; u < 32; ++u) {
      REQUIRE(dist.is_valid(u, v));
      CHECK(std::abs(dist.values.at(u, v) - scene.distances.values.at(u, v)) <=
            1e-9 * scene.distances.values.at(u, v));
    }
  }
  const auto depth = depth_from_normal_distance(scene.normals, dist, K);
  for (int v = 0; v < 24; ++v) {
    for (int u = 0; u < 32; ++u) {
      REQUIRE(depth.is_valid(u, v));
      CHECK(std::abs(depth.values.at(u, v) - scene.depth.values.at(u, v)) <=
            1e-9 * scene.depth.values.at(u, v));
    }
  }
}

TEST_CASE("normals from constant depth are the optical axis") {
  const auto K = simple_intrinsics(9, 9);
  const auto depth = constant_depth(9, 9, 3.0);
  const auto normals = normals_from_depth(depth, K, 3);
  for (int v = 1; v < 8; ++v) {
    for (int u = 1; u < 8; ++u) {
      REQUIRE(normals.is_valid(u, v));
      CHECK((normals.vectors.at(u, v) - Eigen::Vector3d(0, 0, 1)).norm() <
            1e-9);
    }
  }
}

TEST_CASE("normals from tilted synthetic plane match the generator") {
  const auto K = simple_intrinsics(24, 24);
  PlanarSceneSpec spec;
  spec.intrinsics = K;
  ScenePlane plane;
  plane.normal = Eigen::Vector3d(0.3, -0.2, 1.0).normalized();
  plane.distance = 2.5;
  plane.region = RegionRect{0, 0, 24, 24};
  spec.planes.push_back(plane);
  const auto scene = generate_planar_scene(spec);

  for (const int window : {3, 5, 7}) {
    const auto normals = normals_from_depth(scene.depth, K, window);
    const int r = window / 2;
    for (int v = r; v < 24 - r; ++v) {
      for (int u = r; u < 24 - r; ++u) {
        REQUIRE(normals.is_valid(u, v));
        const double dot = std::clamp(
            normals.vectors.at(u, v).dot(plane.normal), -1.0, 1.0);
        CHECK(std::acos(dot) < 1e-4);
      }
    }
  }
}

TEST_CASE("normal fit needs at least 3 usable points") {
  const auto K = simple_intrinsics(7, 7);
  DepthMap depth(7, 7);
  depth.set(3, 3, 2.0);
  depth.set(3, 4, 2.0);  // only two valid points in any window
  const auto normals = normals_from_depth(depth, K, 3);
  CHECK(!normals.is_valid(3, 3));
  CHECK(!normals.is_valid(3, 4));
}

TEST_CASE("normals_from_depth rejects even or non-positive windows") {
  const auto K = simple_intrinsics(4, 4);
  const auto depth = constant_depth(4, 4, 1.0);
  CHECK_THROWS_AS(normals_from_depth(depth, K, 4), ParameterError);
  CHECK_THROWS_AS(normals_from_depth(depth, K, 0), ParameterError);
  CHECK_THROWS_AS(normals_from_depth(depth, K, -3), ParameterError);
}

TEST_CASE("fitted normals are unit and obey the orientation convention") {
  const auto K = simple_intrinsics(20, 16);
  const auto spec = random_scene_spec(23, 4, K, 0.0, 5);
  const auto scene = generate_planar_scene(spec);
  const auto normals = normals_from_depth(scene.depth, K, 5);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 20; ++u) {
      if (!normals.is_valid(u, v)) continue;
      CHECK(std::abs(normals.vectors.at(u, v).norm() - 1.0) <= 1e-6);
      const Eigen::Vector3d p = K.ray(u, v) * scene.depth.values.at(u, v);
      CHECK(normals.vectors.at(u, v).dot(p) >= 0.0);
    }
  }
}

TEST_CASE("normal estimation is invariant to global depth scale") {
  const auto K = simple_intrinsics(16, 12);
  const auto spec = random_scene_spec(31, 2, K, 0.0, 5);
  const auto scene = generate_planar_scene(spec);
  const auto normals = normals_from_depth(scene.depth, K, 3);

  auto scaled_depth = scene.depth;
  for (auto& value : scaled_depth.values.data()) value *= 4.0;
  const auto scaled = normals_from_depth(scaled_depth, K, 3);
  for (int v = 0; v < 12; ++v) {
    for (int u = 0; u < 16; ++u) {
      REQUIRE(normals.is_valid(u, v) == scaled.is_valid(u, v));
      if (!normals.is_valid(u, v)) continue;
      CHECK((normals.vectors.at(u, v) - scaled.vectors.at(u, v)).norm() <
            1e-9);
    }
  }
}

TEST_CASE("discontinuity threshold keeps plane fits apart") {
  const auto K = simple_intrinsics(10, 10);
  DepthMap depth(10, 10);
  // Left half at 1 m, right half at 10 m: a 3x3 window straddling the jump
  // must ignore the far points rather than fit a slanted mix.
  for (int v = 0; v < 10; ++v) {
    for (int u = 0; u < 10; ++u) depth.set(u, v, u < 5 ? 1.0 : 10.0);
  }
  const auto normals = normals_from_depth(depth, K, 3);
  for (int v = 1; v < 9; ++v) {
    CHECK((normals.vectors.at(4, v) - Eigen::Vector3d(0, 0, 1)).norm() <
          1e-9);
    CHECK((normals.vectors.at(5, v) - Eigen::Vector3d(0, 0, 1)).norm() <
          1e-9);
  }
}
