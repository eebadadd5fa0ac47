// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nd/losses.hpp"
#include "nd/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nd;
using namespace nd::testing;

namespace {

DepthMap random_depth(int w, int h, Rng& rng, double lo = 0.5,
                      double hi = 8.0) {
  DepthMap depth(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (rng.uniform() < 0.9) depth.set(u, v, rng.uniform(lo, hi));
    }
  }
  return depth;
}

UncertaintyMap random_uncertainty(int w, int h, Rng& rng) {
  UncertaintyMap map(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (rng.uniform() < 0.9) map.set(u, v, rng.uniform());
    }
  }
  return map;
}

NormalMap random_normals(int w, int h, Rng& rng) {
  NormalMap normals(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (rng.uniform() < 0.9) {
        Eigen::Vector3d n(rng.normal(), rng.normal(), rng.normal());
        if (n.norm() < 1e-6) n = Eigen::Vector3d::UnitZ();
        normals.set(u, v, n.normalized());
      }
    }
  }
  return normals;
}

}  // namespace

TEST_CASE("plane consistency is zero for constant maps") {
  const auto normals = constant_normals(5, 4, {0, 0, 1});
  const auto dist = constant_distances(5, 4, 2.0);
  const auto segments = single_segment_labels(5, 4);
  CHECK(plane_consistency_loss(normals, dist, segments) == 0.0);
}

TEST_CASE("plane consistency on a 1x3 distance ramp") {
  auto normals = constant_normals(3, 1, {0, 0, 1});
  DistanceMap dist(3, 1);
  dist.set(0, 0, 1.0);
  dist.set(1, 0, 2.0);
  dist.set(2, 0, 2.0);
  const auto segments = single_segment_labels(3, 1);
  CHECK(plane_consistency_loss(normals, dist, segments) == 1.0);
}

TEST_CASE("plane consistency with an all-false mask is zero") {
  const auto normals = constant_normals(4, 4, {0, 0, 1});
  DistanceMap dist(4, 4);
  Rng rng(3);
  for (int v = 0; v < 4; ++v) {
    for (int u = 0; u < 4; ++u) dist.set(u, v, rng.uniform(1.0, 3.0));
  }
  auto segments = single_segment_labels(4, 4);
  for (auto& m : segments.planar_mask.data()) m = 0;
  CHECK(plane_consistency_loss(normals, dist, segments) == 0.0);
}

TEST_CASE("plane consistency ignores cross-segment gradients") {
  // Two flat segments with different distances: the jump at the boundary
  // must not count even though the mask covers both sides.
  const auto normals = constant_normals(4, 1, {0, 0, 1});
  DistanceMap dist(4, 1);
  dist.set(0, 0, 1.0);
  dist.set(1, 0, 1.0);
  dist.set(2, 0, 5.0);
  dist.set(3, 0, 5.0);
  SegmentLabelMap segments(4, 1);
  for (int u = 0; u < 4; ++u) {
    segments.labels.at(u, 0) = u < 2 ? 0 : 1;
    segments.planar_mask.at(u, 0) = 1;
  }
  segments.segment_areas = {2, 2};
  CHECK(plane_consistency_loss(normals, dist, segments) == 0.0);
}

TEST_CASE("plane consistency responds to a single perturbation") {
  const auto K = simple_intrinsics(16, 12);
  PlanarSceneSpec spec;
  spec.intrinsics = K;
  spec.planes.push_back(
      {Eigen::Vector3d(0.2, 0.1, 1.0).normalized(), 2.0,
       RegionRect{0, 0, 16, 12}});
  const auto scene = generate_planar_scene(spec);
  CHECK(plane_consistency_loss(scene.normals, scene.distances,
                               scene.labels) == 0.0);
  auto perturbed = scene.distances;
  perturbed.values.at(7, 5) += 1e-6;
  CHECK(plane_consistency_loss(scene.normals, perturbed, scene.labels) > 0.0);
}

TEST_CASE("silog loss vanishes for perfect predictions") {
  const auto gt = constant_depth(4, 4, 2.5);
  LossWeights w;
  std::vector<std::pair<DepthMap, DepthMap>> seq(3, {gt, gt});
  CHECK(silog_depth_loss(seq, gt, w) == 0.0);
}

TEST_CASE("silog with eta=1 is scale invariant") {
  Rng rng(17);
  const auto gt = random_depth(8, 8, rng);
  LossWeights w;
  w.eta = 1.0;
  for (double s : {0.5, 2.0, 10.0}) {
    auto pred = gt;
    for (auto& value : pred.values.data()) value *= s;
    std::vector<std::pair<DepthMap, DepthMap>> seq = {{pred, pred}};
    CHECK(silog_depth_loss(seq, gt, w) <= 1e-12);
  }
}

TEST_CASE("silog hand-computed two-pixel value") {
  DepthMap gt(2, 1);
  gt.set(0, 0, 1.0);
  gt.set(1, 0, 1.0);
  DepthMap pred(2, 1);
  pred.set(0, 0, 1.0);  // g = 0
  pred.set(1, 0, 2.0);  // g = ln 2
  LossWeights w;        // kappa 10, eta 0.85, gamma 0.85, m 3

  // Single iteration t=1 with the second head exactly correct.
  std::vector<std::pair<DepthMap, DepthMap>> seq = {{pred, gt}};
  const double l2 = std::log(2.0);
  const double expected =
      0.85 * 0.85 * 10.0 * std::sqrt(0.5 * l2 * l2 - 0.85 * 0.25 * l2 * l2);
  CHECK(silog_depth_loss(seq, gt, w) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("silog error conditions") {
  const auto gt = constant_depth(2, 2, 1.0);
  LossWeights w;
  SUBCASE("empty valid set") {
    DepthMap pred(2, 2);  // all invalid
    std::vector<std::pair<DepthMap, DepthMap>> seq = {{pred, gt}};
    CHECK_THROWS_AS(silog_depth_loss(seq, gt, w), UndefinedValueError);
  }
  SUBCASE("non-positive depth on a valid pixel") {
    auto pred = gt;
    pred.values.at(0, 0) = 0.0;  // corrupted but flagged valid
    std::vector<std::pair<DepthMap, DepthMap>> seq = {{pred, gt}};
    CHECK_THROWS_AS(silog_depth_loss(seq, gt, w), DomainError);
  }
  SUBCASE("sequence longer than max iterations") {
    std::vector<std::pair<DepthMap, DepthMap>> seq(4, {gt, gt});
    CHECK_THROWS_AS(silog_depth_loss(seq, gt, w), ParameterError);
  }
  SUBCASE("iteration zero flag admits one extra element") {
    std::vector<std::pair<DepthMap, DepthMap>> seq(4, {gt, gt});
    CHECK(silog_depth_loss(seq, gt, w, true) == 0.0);
  }
}

TEST_CASE("silog iteration-zero weighting") {
  DepthMap gt(1, 1);
  gt.set(0, 0, 1.0);
  DepthMap pred(1, 1);
  pred.set(0, 0, std::exp(1.0));  // g = 1 exactly
  LossWeights w;
  w.eta = 0.0;  // head value = kappa * sqrt(mean g^2) = 10

  std::vector<std::pair<DepthMap, DepthMap>> seq = {{pred, gt}};
  // As iteration 1: gamma^(3-1) * 10; as iteration 0: gamma^3 * 10.
  CHECK(silog_depth_loss(seq, gt, w) ==
        doctest::Approx(0.85 * 0.85 * 10.0).epsilon(1e-12));
  CHECK(silog_depth_loss(seq, gt, w, true) ==
        doctest::Approx(0.85 * 0.85 * 0.85 * 10.0).epsilon(1e-12));
}

TEST_CASE("l1l2 hand values") {
  DepthMap gt(2, 1), pred(2, 1);
  SUBCASE("half-meter error on one pixel") {
    gt.set(0, 0, 2.0);
    pred.set(0, 0, 2.5);
    CHECK(l1l2_depth_loss(pred, gt) == 0.75);
  }
  SUBCASE("symmetric errors") {
    gt.set(0, 0, 2.0);
    gt.set(1, 0, 2.0);
    pred.set(0, 0, 3.0);
    pred.set(1, 0, 1.0);
    CHECK(l1l2_depth_loss(pred, gt) == 2.0);
  }
  SUBCASE("perfect prediction") {
    gt.set(0, 0, 2.0);
    CHECK(l1l2_depth_loss(gt, gt) == 0.0);
  }
  SUBCASE("empty set") {
    CHECK_THROWS_AS(l1l2_depth_loss(DepthMap(2, 1), gt), UndefinedValueError);
  }
}

TEST_CASE("normal cosine loss endpoints") {
  const auto up = constant_normals(3, 3, {0, 0, 1});
  CHECK(normal_cosine_loss(up, up) == 0.0);
  const auto down = constant_normals(3, 3, {0, 0, -1});
  CHECK(normal_cosine_loss(up, down) == 2.0);
  const auto side = constant_normals(3, 3, {1, 0, 0});
  CHECK(normal_cosine_loss(up, side) == 1.0);
}

TEST_CASE("distance L1 loss") {
  DistanceMap gt(2, 1), pred(2, 1);
  gt.set(0, 0, 1.0);
  gt.set(1, 0, 1.0);
  pred.set(0, 0, 1.2);
  pred.set(1, 0, 1.4);
  CHECK(distance_l1_loss(pred, gt) == doctest::Approx(0.3).epsilon(1e-12));

  gt.set_invalid(1, 0);
  CHECK(distance_l1_loss(pred, gt) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("uncertainty target closed form") {
  DepthMap gt(3, 1), pred(3, 1);
  gt.set(0, 0, 2.0);
  pred.set(0, 0, 2.0);
  gt.set(1, 0, 2.0);
  pred.set(1, 0, 2.2);  // |e| = b
  gt.set(2, 0, 2.0);
  pred.set(2, 0, 4.0);  // |e| = 10 b
  const auto target = uncertainty_target(pred, gt, 0.2);
  CHECK(target.values.at(0, 0) == 0.0);
  CHECK(target.values.at(1, 0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(target.values.at(2, 0) ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(uncertainty_target(pred, gt, 0.0), ParameterError);
}

TEST_CASE("uncertainty target is increasing and bounded") {
  DepthMap gt(1, 1), pred(1, 1);
  gt.set(0, 0, 5.0);
  double last = -1.0;
  for (double e = 0.0; e <= 3.0; e += 0.1) {
    pred.set(0, 0, 5.0 + e);
    const auto target = uncertainty_target(pred, gt, 0.2);
    const double value = target.values.at(0, 0);
    CHECK(value > last);
    CHECK(value >= 0.0);
    CHECK(value < 1.0);
    last = value;
  }
}

TEST_CASE("uncertainty loss sums both heads without normalization") {
  UncertaintyMap u1(1, 1), u2(1, 1), g1(1, 1), g2(1, 1);
  u1.set(0, 0, 0.5);
  g1.set(0, 0, 0.4);
  u2.set(0, 0, 0.9);
  g2.set(0, 0, 0.6);
  CHECK(uncertainty_loss(u1, u2, g1, g2) ==
        doctest::Approx(0.4).epsilon(1e-12));

  SUBCASE("perfect predictions") {
    CHECK(uncertainty_loss(g1, g2, g1, g2) == 0.0);
  }
  SUBCASE("empty sets sum to zero") {
    UncertaintyMap empty(1, 1);
    CHECK(uncertainty_loss(empty, empty, empty, empty) == 0.0);
  }
}

TEST_CASE("overall loss combines with the published weights") {
  LossWeights w;
  LossTerms terms;
  SUBCASE("all zero") {
    CHECK(overall_loss(terms, w).total == 0.0);
  }
  SUBCASE("unit terms") {
    terms = {1.0, 1.0, 1.0, 1.0, 1.0, 0};
    CHECK(overall_loss(terms, w).total ==
          doctest::Approx(7.26).epsilon(1e-12));
  }
  SUBCASE("zero weights kill any terms") {
    w.lambda_depth = w.lambda_normal = w.lambda_distance = 0.0;
    w.lambda_uncertainty = w.lambda_plane_consistency = 0.0;
    terms = {3.0, 1.0, 4.0, 1.0, 5.0, 0};
    CHECK(overall_loss(terms, w).total == 0.0);
  }
  SUBCASE("non-finite term rejected") {
    terms.depth = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(overall_loss(terms, w), DomainError);
  }
}

TEST_CASE("losses ignore values stored at invalid pixels") {
  Rng rng(29);
  const auto gt = random_depth(8, 8, rng);
  const auto pred = random_depth(8, 8, rng);
  const auto n_gt = random_normals(8, 8, rng);
  const auto n_pred = random_normals(8, 8, rng);

  auto scribble_depth = [&](DepthMap m) {
    for (int v = 0; v < m.height(); ++v) {
      for (int u = 0; u < m.width(); ++u) {
        if (!m.is_valid(u, v)) m.values.at(u, v) = rng.uniform(-9.0, 9.0);
      }
    }
    return m;
  };
  auto scribble_normals = [&](NormalMap m) {
    for (int v = 0; v < m.height(); ++v) {
      for (int u = 0; u < m.width(); ++u) {
        if (!m.valid.at(u, v)) {
          m.vectors.at(u, v) =
              Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
        }
      }
    }
    return m;
  };

  CHECK(l1l2_depth_loss(pred, gt) ==
        l1l2_depth_loss(scribble_depth(pred), scribble_depth(gt)));
  CHECK(normal_cosine_loss(n_pred, n_gt) ==
        normal_cosine_loss(scribble_normals(n_pred),
                           scribble_normals(n_gt)));
}

TEST_CASE("losses agree with the naive oracles on random maps") {
  Rng rng(31);
  LossWeights w;
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = random_depth(16, 16, rng);
    const auto d1 = random_depth(16, 16, rng);
    const auto d2 = random_depth(16, 16, rng);

    std::vector<std::pair<DepthMap, DepthMap>> seq = {{d1, d2}, {d2, d1}};
    CHECK(silog_depth_loss(seq, gt, w) ==
          doctest::Approx(oracle_silog_sequence(seq, gt, w.kappa, w.eta,
                                                w.gamma, w.max_iterations))
              .epsilon(1e-12));
    CHECK(l1l2_depth_loss(d1, gt) ==
          doctest::Approx(oracle_l1l2(d1, gt)).epsilon(1e-12));

    const auto n1 = random_normals(16, 16, rng);
    const auto n2 = random_normals(16, 16, rng);
    CHECK(normal_cosine_loss(n1, n2) ==
          doctest::Approx(oracle_cosine(n1, n2)).epsilon(1e-12));

    const auto u1 = random_uncertainty(16, 16, rng);
    const auto u2 = random_uncertainty(16, 16, rng);
    const auto g1 = random_uncertainty(16, 16, rng);
    const auto g2 = random_uncertainty(16, 16, rng);
    CHECK(uncertainty_loss(u1, u2, g1, g2) ==
          doctest::Approx(oracle_uncertainty_loss(u1, u2, g1, g2))
              .epsilon(1e-12));
  }
}
