// SPDX-License-Identifier: Apache-2.0
#include "nd/losses.hpp"

#include <cmath>
#include <sstream>

namespace nd {

namespace {

/// Depth below this is treated as corrupted input for log-domain losses.
constexpr double kLogFloor = 1e-6;

double silog_single_head(const DepthMap& pred, const DepthMap& gt,
                         double kappa, double eta) {
  double sum_g = 0.0;
  double sum_g2 = 0.0;
  long long count = 0;
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      const double p = pred.values.at(u, v);
      const double g_val = gt.values.at(u, v);
      if (p < kLogFloor || g_val < kLogFloor) {
        throw DomainError("silog_depth_loss: non-positive depth on a valid "
                          "pixel");
      }
      const double g = std::log(p) - std::log(g_val);
      sum_g += g;
      sum_g2 += g * g;
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("silog_depth_loss: empty valid set");
  }
  const double n = static_cast<double>(count);
  const double radicand = sum_g2 / n - eta * (sum_g / n) * (sum_g / n);
  // eta <= 1 keeps the radicand >= 0; clamp rounding residue.
  return kappa * std::sqrt(std::max(radicand, 0.0));
}

}  // namespace

void LossWeights::validate() const {
  const double values[] = {lambda_depth,       lambda_normal,
                           lambda_distance,    lambda_uncertainty,
                           lambda_plane_consistency};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ParameterError("LossWeights: non-finite lambda");
    }
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ParameterError("LossWeights: gamma must be in (0, 1]");
  }
  if (max_iterations < 1) {
    throw ParameterError("LossWeights: max_iterations must be at least 1");
  }
  if (!(kappa > 0.0)) {
    throw ParameterError("LossWeights: kappa must be positive");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ParameterError("LossWeights: eta must be in [0, 1]");
  }
  if (!(uncertainty_b > 0.0)) {
    throw ParameterError("LossWeights: uncertainty_b must be positive");
  }
}

double plane_consistency_loss(const NormalMap& normals,
                              const DistanceMap& distances,
                              const SegmentLabelMap& segments) {
  detail::require_same_shape(normals.width(), normals.height(),
                             distances.width(), distances.height(),
                             "plane_consistency_loss: normals vs distances");
  detail::require_same_shape(normals.width(), normals.height(),
                             segments.width(), segments.height(),
                             "plane_consistency_loss: maps vs segments");
  const int w = normals.width();
  const int h = normals.height();

  // Forward difference is admissible only inside one segment.
  auto same_segment = [&](int u, int v, int qu, int qv) {
    const int32_t a = segments.labels.at(u, v);
    return a != kUnlabeled && a == segments.labels.at(qu, qv);
  };

  double loss = 0.0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (segments.planar_mask.at(u, v) == 0) continue;
      for (const auto& [du, dv] : {std::pair{1, 0}, std::pair{0, 1}}) {
        const int qu = u + du;
        const int qv = v + dv;
        if (qu >= w || qv >= h || !same_segment(u, v, qu, qv)) continue;
        if (normals.is_valid(u, v) && normals.is_valid(qu, qv)) {
          loss += (normals.vectors.at(qu, qv) - normals.vectors.at(u, v))
                      .lpNorm<1>();
        }
        if (distances.is_valid(u, v) && distances.is_valid(qu, qv)) {
          loss += std::abs(distances.values.at(qu, qv) -
                           distances.values.at(u, v));
        }
      }
    }
  }
  return loss;
}

double silog_depth_loss(
    const std::vector<std::pair<DepthMap, DepthMap>>& pred_sequence,
    const DepthMap& gt, const LossWeights& w, bool include_iteration_zero) {
  w.validate();
  const int first_iteration = include_iteration_zero ? 0 : 1;
  const int last_iteration =
      first_iteration + static_cast<int>(pred_sequence.size()) - 1;
  if (last_iteration > w.max_iterations) {
    throw ParameterError("silog_depth_loss: sequence longer than "
                          "max_iterations");
  }
  double loss = 0.0;
  int t = first_iteration;
  for (const auto& [d1, d2] : pred_sequence) {
    detail::require_same_shape(d1.width(), d1.height(), gt.width(),
                               gt.height(), "silog_depth_loss: pred vs gt");
    detail::require_same_shape(d2.width(), d2.height(), gt.width(),
                               gt.height(), "silog_depth_loss: pred vs gt");
    const double decay = std::pow(w.gamma, w.max_iterations - t);
    loss += decay * (silog_single_head(d1, gt, w.kappa, w.eta) +
                     silog_single_head(d2, gt, w.kappa, w.eta));
    ++t;
  }
  return loss;
}

double l1l2_depth_loss(const DepthMap& pred, const DepthMap& gt) {
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "l1l2_depth_loss: pred vs gt");
  double sum = 0.0;
  long long count = 0;
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      const double e = pred.values.at(u, v) - gt.values.at(u, v);
      sum += std::abs(e) + e * e;
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("l1l2_depth_loss: empty valid set");
  }
  return sum / static_cast<double>(count);
}

double normal_cosine_loss(const NormalMap& pred, const NormalMap& gt) {
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "normal_cosine_loss: pred vs gt");
  double sum = 0.0;
  long long count = 0;
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      sum += 1.0 - pred.vectors.at(u, v).dot(gt.vectors.at(u, v));
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("normal_cosine_loss: empty valid set");
  }
  return sum / static_cast<double>(count);
}

double distance_l1_loss(const DistanceMap& pred, const DistanceMap& gt) {
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "distance_l1_loss: pred vs gt");
  double sum = 0.0;
  long long count = 0;
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      sum += std::abs(pred.values.at(u, v) - gt.values.at(u, v));
      ++count;
    }
  }
  if (count == 0) {
    throw UndefinedValueError("distance_l1_loss: empty valid set");
  }
  return sum / static_cast<double>(count);
}

UncertaintyMap uncertainty_target(const DepthMap& pred, const DepthMap& gt,
                                  double b) {
  if (!(b > 0.0)) {
    throw ParameterError("uncertainty_target: b must be positive");
  }
  detail::require_same_shape(pred.width(), pred.height(), gt.width(),
                             gt.height(), "uncertainty_target: pred vs gt");
  UncertaintyMap target(pred.width(), pred.height());
  for (int v = 0; v < pred.height(); ++v) {
    for (int u = 0; u < pred.width(); ++u) {
      if (!pred.is_valid(u, v) || !gt.is_valid(u, v)) continue;
      const double err = std::abs(pred.values.at(u, v) - gt.values.at(u, v));
      target.set(u, v, 1.0 - std::exp(-err / b));
    }
  }
  return target;
}

double uncertainty_loss(const UncertaintyMap& u1, const UncertaintyMap& u2,
                        const UncertaintyMap& u1_gt,
                        const UncertaintyMap& u2_gt) {
  detail::require_same_shape(u1.width(), u1.height(), u1_gt.width(),
                             u1_gt.height(), "uncertainty_loss: U1 vs target");
  detail::require_same_shape(u2.width(), u2.height(), u2_gt.width(),
                             u2_gt.height(), "uncertainty_loss: U2 vs target");
  detail::require_same_shape(u1.width(), u1.height(), u2.width(), u2.height(),
                             "uncertainty_loss: U1 vs U2");
  double sum = 0.0;
  for (int v = 0; v < u1.height(); ++v) {
    for (int u = 0; u < u1.width(); ++u) {
      if (u1.is_valid(u, v) && u1_gt.is_valid(u, v)) {
        sum += std::abs(u1.values.at(u, v) - u1_gt.values.at(u, v));
      }
      if (u2.is_valid(u, v) && u2_gt.is_valid(u, v)) {
        sum += std::abs(u2.values.at(u, v) - u2_gt.values.at(u, v));
      }
    }
  }
  return sum;
}

LossReport overall_loss(const LossTerms& terms, const LossWeights& w) {
  w.validate();
  const double values[] = {terms.depth, terms.normal, terms.distance,
                           terms.uncertainty, terms.plane_consistency};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError("overall_loss: non-finite loss term");
    }
  }
  LossReport report;
  report.terms = terms;
  report.total = w.lambda_depth * terms.depth +
                 w.lambda_normal * terms.normal +
                 w.lambda_distance * terms.distance +
                 w.lambda_uncertainty * terms.uncertainty +
                 w.lambda_plane_consistency * terms.plane_consistency;
  return report;
}

std::string LossReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"depth\": " << terms.depth << ", \"normal\": " << terms.normal
     << ", \"distance\": " << terms.distance
     << ", \"uncertainty\": " << terms.uncertainty
     << ", \"plane_consistency\": " << terms.plane_consistency
     << ", \"total\": " << total << ", \"valid_count\": " << terms.valid_count
     << "}";
  return os.str();
}

}  // namespace nd
