// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nd/metrics.hpp"
#include "nd/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nd;
using namespace nd::testing;

namespace {

DepthMap random_depth(int w, int h, Rng& rng) {
  DepthMap depth(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (rng.uniform() < 0.92) depth.set(u, v, rng.uniform(0.3, 12.0));
    }
  }
  return depth;
}

}  // namespace

TEST_CASE("self-evaluation is all zeros and ones") {
  Rng rng(3);
  const auto gt = random_depth(16, 16, rng);
  const auto r = depth_metrics(gt, gt, 0.0, 100.0);
  CHECK(r.abs_rel == 0.0);
  CHECK(r.sq_rel == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.rmse_log == 0.0);
  CHECK(r.log10 == 0.0);
  CHECK(r.silog == 0.0);
  CHECK(r.irmse == 0.0);
  CHECK(r.mae == 0.0);
  CHECK(r.imae == 0.0);
  CHECK(r.delta1 == 1.0);
  CHECK(r.delta2 == 1.0);
  CHECK(r.delta3 == 1.0);
  CHECK(r.valid_count == gt.valid_count());
}

TEST_CASE("two-pixel hand example fixes the strict-ratio convention") {
  DepthMap gt(2, 1), pred(2, 1);
  gt.set(0, 0, 2.0);
  pred.set(0, 0, 2.0);
  gt.set(1, 0, 4.0);
  pred.set(1, 0, 5.0);
  const auto r = depth_metrics(pred, gt, 0.0, 100.0);
  CHECK(r.abs_rel == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(r.rmse == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  // 5/4 = 1.25 exactly: excluded under the strict '<'.
  CHECK(r.delta1 == 0.5);
  CHECK(r.delta2 == 1.0);
  CHECK(r.sq_rel == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(r.mae == doctest::Approx(500.0).epsilon(1e-15));
}

TEST_CASE("cap interval is half-open") {
  DepthMap gt(4, 1), pred(4, 1);
  for (int u = 0; u < 4; ++u) pred.set(u, 0, 1.0);
  gt.set(0, 0, 2.0);    // inside
  gt.set(1, 0, 80.0);   // == cap_max: included
  gt.set(2, 0, 0.5);    // == cap_min: excluded
  gt.set(3, 0, 81.0);   // above cap: excluded
  const auto r = depth_metrics(pred, gt, 0.5, 80.0);
  CHECK(r.valid_count == 2);
  CHECK_THROWS_AS(depth_metrics(pred, gt, 100.0, 200.0), UndefinedValueError);
  CHECK_THROWS_AS(depth_metrics(pred, gt, 5.0, 5.0), ParameterError);
}

TEST_CASE("metrics match the naive oracle on random maps") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = random_depth(32, 32, rng);
    const auto pred = random_depth(32, 32, rng);
    const auto r = depth_metrics(pred, gt, 0.0, 100.0);
    const auto o = oracle_depth_metrics(pred, gt, 0.0, 100.0);
    CHECK(r.valid_count == o.count);
    CHECK(r.abs_rel == doctest::Approx(o.abs_rel).epsilon(1e-12));
    CHECK(r.sq_rel == doctest::Approx(o.sq_rel).epsilon(1e-12));
    CHECK(r.rmse == doctest::Approx(o.rmse).epsilon(1e-12));
    CHECK(r.rmse_log == doctest::Approx(o.rmse_log).epsilon(1e-12));
    CHECK(r.log10 == doctest::Approx(o.log10).epsilon(1e-12));
    CHECK(r.silog == doctest::Approx(o.silog).epsilon(1e-12));
    CHECK(r.irmse == doctest::Approx(o.irmse).epsilon(1e-12));
    CHECK(r.mae == doctest::Approx(o.mae).epsilon(1e-12));
    CHECK(r.imae == doctest::Approx(o.imae).epsilon(1e-12));
    CHECK(r.delta1 == o.delta1);
    CHECK(r.delta2 == o.delta2);
    CHECK(r.delta3 == o.delta3);
    CHECK(r.delta1 <= r.delta2);
    CHECK(r.delta2 <= r.delta3);
    CHECK(r.delta3 <= 1.0);
  }
}

TEST_CASE("metrics are permutation invariant") {
  Rng rng(11);
  const int w = 8, h = 8;
  const auto gt = random_depth(w, h, rng);
  const auto pred = random_depth(w, h, rng);
  const auto base = depth_metrics(pred, gt, 0.0, 100.0);

  std::vector<size_t> perm(static_cast<size_t>(w) * h);
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
  }
  DepthMap gt_p(w, h), pred_p(w, h);
  for (size_t i = 0; i < perm.size(); ++i) {
    gt_p.values[i] = gt.values[perm[i]];
    gt_p.valid[i] = gt.valid[perm[i]];
    pred_p.values[i] = pred.values[perm[i]];
    pred_p.valid[i] = pred.valid[perm[i]];
  }
  const auto shuffled = depth_metrics(pred_p, gt_p, 0.0, 100.0);
  CHECK(shuffled.abs_rel == doctest::Approx(base.abs_rel).epsilon(1e-12));
  CHECK(shuffled.rmse == doctest::Approx(base.rmse).epsilon(1e-12));
  CHECK(shuffled.silog == doctest::Approx(base.silog).epsilon(1e-12));
  CHECK(shuffled.delta1 == base.delta1);
  CHECK(shuffled.valid_count == base.valid_count);
}

TEST_CASE("normal metrics endpoints") {
  const auto up = constant_normals(6, 6, {0, 0, 1});
  const auto r = normal_metrics(up, up);
  CHECK(r.mean_angle == 0.0);
  CHECK(r.pct_11_25 == 1.0);
  CHECK(r.pct_22_5 == 1.0);
  CHECK(r.pct_30 == 1.0);

  const auto side = constant_normals(6, 6, {1, 0, 0});
  const auto orth = normal_metrics(side, up);
  CHECK(orth.mean_angle == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(orth.pct_11_25 == 0.0);
  CHECK(orth.pct_30 == 0.0);
}

TEST_CASE("half identical, half orthogonal") {
  NormalMap pred(2, 1), gt(2, 1);
  gt.set(0, 0, {0, 0, 1});
  pred.set(0, 0, {0, 0, 1});
  gt.set(1, 0, {0, 0, 1});
  pred.set(1, 0, {0, 1, 0});
  const auto r = normal_metrics(pred, gt);
  CHECK(r.mean_angle == doctest::Approx(45.0).epsilon(1e-12));
  CHECK(r.pct_11_25 == 0.5);
  CHECK(r.pct_22_5 == 0.5);
  CHECK(r.pct_30 == 0.5);
}

TEST_CASE("normal metrics on an empty set fail") {
  NormalMap a(2, 2), b(2, 2);
  CHECK_THROWS_AS(normal_metrics(a, b), UndefinedValueError);
}

TEST_CASE("reports serialize to JSON and CSV") {
  DepthMap gt(2, 1), pred(2, 1);
  gt.set(0, 0, 2.0);
  pred.set(0, 0, 2.0);
  gt.set(1, 0, 4.0);
  pred.set(1, 0, 5.0);
  const auto r = depth_metrics(pred, gt, 0.0, 100.0);
  const auto json = r.to_json();
  CHECK(json.find("\"abs_rel\": 0.125") != std::string::npos);
  CHECK(json.find("\"valid_count\": 2") != std::string::npos);
  const auto header = MetricsReport::csv_header();
  const auto row = r.to_csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
}
