// SPDX-License-Identifier: Apache-2.0
#include "nd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nd {

MetricsReport depth_metrics(const DepthMap& pred, const DepthMap& gt,
                            double cap_min, double cap_max) {
  if (!(cap_min < cap_max)) {
    throw ParameterError("depth_metrics: cap_min must be below cap_max");
  }
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "depth_metrics: pred vs gt");

  double sum_abs_rel = 0.0, sum_sq_rel = 0.0, sum_e2 = 0.0, sum_abs_e = 0.0;
  double sum_dlog2 = 0.0, sum_dlog = 0.0, sum_log10 = 0.0;
  double sum_inv2 = 0.0, sum_abs_inv = 0.0;
  long long hits1 = 0, hits2 = 0, hits3 = 0;
  long long count = 0;

  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      const double g = gt.values.at(u, v);
      if (!(g > cap_min && g <= cap_max)) continue;
      const double p = pred.values.at(u, v);

      const double e = p - g;
      sum_abs_rel += std::abs(e) / g;
      sum_sq_rel += e * e / g;
      sum_e2 += e * e;
      sum_abs_e += std::abs(e);

      const double dlog = std::log(p) - std::log(g);
      sum_dlog2 += dlog * dlog;
      sum_dlog += dlog;
      sum_log10 += std::abs(std::log10(p) - std::log10(g));

      // Inverse depth in 1/km: depths are meters, so 1000/d.
      const double inv_diff = 1000.0 / p - 1000.0 / g;
      sum_inv2 += inv_diff * inv_diff;
      sum_abs_inv += std::abs(inv_diff);

      const double ratio = std::max(p / g, g / p);
      hits1 += ratio < 1.25;
      hits2 += ratio < 1.25 * 1.25;
      hits3 += ratio < 1.25 * 1.25 * 1.25;
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("depth_metrics: empty evaluation set");
  }

  const double n = static_cast<double>(count);
  MetricsReport r;
  r.abs_rel = sum_abs_rel / n;
  r.sq_rel = sum_sq_rel / n;
  r.rmse = std::sqrt(sum_e2 / n);
  r.rmse_log = std::sqrt(sum_dlog2 / n);
  r.log10 = sum_log10 / n;
  r.silog =
      100.0 * std::sqrt(std::max(sum_dlog2 / n - (sum_dlog / n) * (sum_dlog / n),
                                 0.0));
  r.irmse = std::sqrt(sum_inv2 / n);
  r.mae = 1000.0 * sum_abs_e / n;
  r.imae = sum_abs_inv / n;
  r.delta1 = static_cast<double>(hits1) / n;
  r.delta2 = static_cast<double>(hits2) / n;
  r.delta3 = static_cast<double>(hits3) / n;
  r.valid_count = count;
  return r;
}

NormalMetricsReport normal_metrics(const NormalMap& pred,
                                   const NormalMap& gt) {
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "normal_metrics: pred vs gt");
  constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

  double sum_angle = 0.0;
  long long hits_11 = 0, hits_22 = 0, hits_30 = 0;
  long long count = 0;
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      const double dot = std::clamp(
          pred.vectors.at(u, v).dot(gt.vectors.at(u, v)), -1.0, 1.0);
      const double angle = std::acos(dot) * kRadToDeg;
      sum_angle += angle;
      hits_11 += angle < 11.25;
      hits_22 += angle < 22.5;
      hits_30 += angle < 30.0;
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("normal_metrics: empty evaluation set");
  }
  const double n = static_cast<double>(count);
  NormalMetricsReport r;
  r.mean_angle = sum_angle / n;
  r.pct_11_25 = static_cast<double>(hits_11) / n;
  r.pct_22_5 = static_cast<double>(hits_22) / n;
  r.pct_30 = static_cast<double>(hits_30) / n;
  r.valid_count = count;
  return r;
}

std::string MetricsReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"abs_rel\": " << abs_rel << ", \"sq_rel\": " << sq_rel
     << ", \"rmse\": " << rmse << ", \"rmse_log\": " << rmse_log
     << ", \"log10\": " << log10 << ", \"silog\": " << silog
     << ", \"irmse\": " << irmse << ", \"mae\": " << mae
     << ", \"imae\": " << imae << ", \"delta1\": " << delta1
     << ", \"delta2\": " << delta2 << ", \"delta3\": " << delta3
     << ", \"valid_count\": " << valid_count << "}";
  return os.str();
}

std::string MetricsReport::csv_header() {
  return "abs_rel,sq_rel,rmse,rmse_log,log10,silog,irmse,mae,imae,delta1,"
         "delta2,delta3,valid_count";
}

std::string MetricsReport::to_csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << abs_rel << ',' << sq_rel << ',' << rmse << ',' << rmse_log << ','
     << log10 << ',' << silog << ',' << irmse << ',' << mae << ',' << imae
     << ',' << delta1 << ',' << delta2 << ',' << delta3 << ',' << valid_count;
  return os.str();
}

std::string NormalMetricsReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"mean_angle\": " << mean_angle << ", \"pct_11_25\": " << pct_11_25
     << ", \"pct_22_5\": " << pct_22_5 << ", \"pct_30\": " << pct_30
     << ", \"valid_count\": " << valid_count << "}";
  return os.str();
}

}  // namespace nd
