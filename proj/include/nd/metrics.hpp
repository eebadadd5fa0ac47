// SPDX-License-Identifier: Apache-2.0
#ifndef ND_METRICS_HPP_
#define ND_METRICS_HPP_

#include <string>

#include "nd/types.hpp"

namespace nd {

/// Depth evaluation statistics. Distances in meters unless noted.
struct MetricsReport {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  double log10 = 0.0;
  double silog = 0.0;   // benchmark convention, x100
  double irmse = 0.0;   // inverse depth, 1/km
  double mae = 0.0;     // millimeters
  double imae = 0.0;    // inverse depth, 1/km
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  long long valid_count = 0;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

struct NormalMetricsReport {
  double mean_angle = 0.0;  // degrees
  double pct_11_25 = 0.0;
  double pct_22_5 = 0.0;
  double pct_30 = 0.0;
  long long valid_count = 0;

  std::string to_json() const;
};

/// Evaluates depth metrics over pixels valid in both maps with
/// cap_min < gt <= cap_max. Ratio thresholds delta_k use strict '<'.
MetricsReport depth_metrics(const DepthMap& pred, const DepthMap& gt,
                            double cap_min, double cap_max);

/// Angular error statistics between unit normal maps; thresholds at
/// 11.25, 22.5 and 30 degrees (strict '<').
NormalMetricsReport normal_metrics(const NormalMap& pred, const NormalMap& gt);

}  // namespace nd

#endif  // ND_METRICS_HPP_
