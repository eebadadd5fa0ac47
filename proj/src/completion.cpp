// SPDX-License-Identifier: Apache-2.0
#include "nd/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nd/geometry.hpp"
#include "nd/refine.hpp"
#include "nd/rng.hpp"

namespace nd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exact squared Euclidean distance transform with argmin, two-pass
/// lower-envelope method. Returns per-pixel squared distance to the nearest
/// source pixel and its row-major index (-1 if there are no sources).
struct NearestSourceTransform {
  Grid<double> squared_distance;
  Grid<int32_t> source_index;
};

NearestSourceTransform nearest_source_transform(const Mask& sources) {
  const int w = sources.width();
  const int h = sources.height();
  NearestSourceTransform out{Grid<double>(w, h, kInf),
                             Grid<int32_t>(w, h, -1)};

  // Pass 1: nearest source within each column.
  Grid<double> col_d2(w, h, kInf);
  Grid<int32_t> col_src(w, h, -1);
  for (int u = 0; u < w; ++u) {
    int last = -1;
    for (int v = 0; v < h; ++v) {
      if (sources.at(u, v)) last = v;
      if (last >= 0) {
        col_d2.at(u, v) = static_cast<double>(v - last) * (v - last);
        col_src.at(u, v) = static_cast<int32_t>(sources.index(u, last));
      }
    }
    last = -1;
    for (int v = h - 1; v >= 0; --v) {
      if (sources.at(u, v)) last = v;
      if (last >= 0) {
        const double d2 = static_cast<double>(last - v) * (last - v);
        if (d2 < col_d2.at(u, v)) {
          col_d2.at(u, v) = d2;
          col_src.at(u, v) = static_cast<int32_t>(sources.index(u, last));
        }
      }
    }
  }

  // Pass 2: per row, lower envelope of the parabolas x -> (x-q)^2 + f(q).
  std::vector<int> hull(w);
  std::vector<double> boundary(w + 1);
  for (int v = 0; v < h; ++v) {
    int k = -1;
    for (int q = 0; q < w; ++q) {
      const double f = col_d2.at(q, v);
      if (f == kInf) continue;
      double s = 0.0;
      while (k >= 0) {
        const int p = hull[k];
        s = ((f + q * q) - (col_d2.at(p, v) + p * p)) / (2.0 * (q - p));
        if (s > boundary[k]) break;
        --k;
      }
      if (k < 0) {
        k = 0;
        hull[0] = q;
        boundary[0] = -kInf;
        boundary[1] = kInf;
      } else {
        ++k;
        hull[k] = q;
        boundary[k] = s;
        boundary[k + 1] = kInf;
      }
    }
    if (k < 0) continue;  // row has no candidates in any column
    int j = 0;
    for (int u = 0; u < w; ++u) {
      while (boundary[j + 1] < u) ++j;
      const int q = hull[j];
      out.squared_distance.at(u, v) =
          static_cast<double>(u - q) * (u - q) + col_d2.at(q, v);
      out.source_index.at(u, v) = col_src.at(q, v);
    }
  }
  return out;
}

std::vector<std::array<int, 2>> default_8_neighborhood() {
  return {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
}

}  // namespace

SparseSamples sample_sparse(const DepthMap& dense_depth,
                            const NormalMap& dense_normal,
                            const DistanceMap& dense_dist, long long n,
                            uint64_t seed) {
  detail::require_same_shape(dense_depth.width(), dense_depth.height(),
                             dense_normal.width(), dense_normal.height(),
                             "sample_sparse: depth vs normal");
  detail::require_same_shape(dense_depth.width(), dense_depth.height(),
                             dense_dist.width(), dense_dist.height(),
                             "sample_sparse: depth vs distance");
  if (n < 0) {
    throw ParameterError("sample_sparse: negative sample count");
  }

  std::vector<uint32_t> candidates;
  candidates.reserve(dense_depth.values.size());
  for (size_t i = 0; i < dense_depth.values.size(); ++i) {
    if (dense_depth.valid[i]) candidates.push_back(static_cast<uint32_t>(i));
  }
  if (n > static_cast<long long>(candidates.size())) {
    throw ParameterError("sample_sparse: requested " + std::to_string(n) +
                         " samples but only " +
                         std::to_string(candidates.size()) +
                         " valid pixels exist");
  }

  // Partial Fisher-Yates; the first n entries are the sample.
  Rng rng(seed);
  for (long long i = 0; i < n; ++i) {
    const uint64_t j =
        i + rng.uniform_below(static_cast<uint64_t>(candidates.size()) - i);
    std::swap(candidates[i], candidates[j]);
  }

  SparseSamples out;
  out.depth = DepthMap(dense_depth.width(), dense_depth.height());
  out.normal = NormalMap(dense_depth.width(), dense_depth.height());
  out.distance = DistanceMap(dense_depth.width(), dense_depth.height());
  out.sample_count = n;
  for (long long i = 0; i < n; ++i) {
    const uint32_t idx = candidates[i];
    out.depth.values[idx] = dense_depth.values[idx];
    out.depth.valid[idx] = 1;
    if (dense_normal.valid[idx]) {
      out.normal.vectors[idx] = dense_normal.vectors[idx];
      out.normal.valid[idx] = 1;
    }
    if (dense_dist.valid[idx]) {
      out.distance.values[idx] = dense_dist.values[idx];
      out.distance.valid[idx] = 1;
    }
  }
  return out;
}

std::pair<NormalMap, DistanceMap> sparse_nd_from_sparse_depth(
    const DepthMap& sparse_depth, const CameraIntrinsics& K, int window) {
  if (window <= 0 || window % 2 == 0) {
    throw ParameterError(
        "sparse_nd_from_sparse_depth: window must be odd and positive");
  }
  detail::require_same_shape(sparse_depth.width(), sparse_depth.height(),
                             K.width, K.height,
                             "sparse_nd_from_sparse_depth: depth vs "
                             "intrinsics");
  const int w = sparse_depth.width();
  const int h = sparse_depth.height();

  struct Sample {
    int u, v;
    Eigen::Vector3d point;
  };
  std::vector<Sample> samples;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!sparse_depth.is_valid(u, v)) continue;
      samples.push_back({u, v, K.ray(u, v) * sparse_depth.values.at(u, v)});
    }
  }
  if (samples.size() < 3) {
    throw InsufficientDataError(
        "sparse_nd_from_sparse_depth: fewer than 3 valid points");
  }

  NormalMap normals(w, h);
  DistanceMap distances(w, h);
  const int radius = window / 2;
  std::vector<Eigen::Vector3d> pts;
  std::vector<std::pair<int64_t, size_t>> ranked;  // (d^2, sample index)
  for (const auto& center : samples) {
    pts.clear();
    for (int dv = -radius; dv <= radius; ++dv) {
      for (int du = -radius; du <= radius; ++du) {
        const int qu = center.u + du;
        const int qv = center.v + dv;
        if (!sparse_depth.valid.in_bounds(qu, qv) ||
            !sparse_depth.is_valid(qu, qv)) {
          continue;
        }
        pts.emplace_back(K.ray(qu, qv) * sparse_depth.values.at(qu, qv));
      }
    }
    std::optional<Eigen::Vector3d> fitted;
    if (pts.size() >= 3) fitted = fit_plane_normal(pts);
    if (!fitted) {
      // Too few (or degenerate) in-window points: fall back to the 9
      // nearest samples.
      ranked.clear();
      ranked.reserve(samples.size());
      for (size_t i = 0; i < samples.size(); ++i) {
        const int64_t du = samples[i].u - center.u;
        const int64_t dv = samples[i].v - center.v;
        ranked.emplace_back(du * du + dv * dv, i);
      }
      const size_t keep = std::min<size_t>(9, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end());
      pts.clear();
      for (size_t i = 0; i < keep; ++i) {
        pts.push_back(samples[ranked[i].second].point);
      }
      fitted = fit_plane_normal(pts);
    }
    if (!fitted) continue;
    Eigen::Vector3d n = *fitted;
    if (n.dot(center.point) < 0.0) n = -n;
    normals.set(center.u, center.v, n);
    distances.set(center.u, center.v, n.dot(center.point));
  }
  return {std::move(normals), std::move(distances)};
}

std::pair<NormalMap, DistanceMap> planar_fill(const SparseSamples& samples,
                                              const SegmentLabelMap& labels) {
  detail::require_same_shape(samples.depth.width(), samples.depth.height(),
                             labels.width(), labels.height(),
                             "planar_fill: samples vs labels");
  const int w = labels.width();
  const int h = labels.height();
  const int segment_count = labels.segment_count();

  auto sample_usable = [&](size_t i) {
    return samples.normal.valid[i] && samples.distance.valid[i];
  };

  // Per-segment accumulation of sampled normals and distances.
  std::vector<Eigen::Vector3d> normal_sum(segment_count,
                                          Eigen::Vector3d::Zero());
  std::vector<double> distance_sum(segment_count, 0.0);
  std::vector<int64_t> counts(segment_count, 0);
  std::vector<size_t> sample_indices;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t i = labels.labels.index(u, v);
      if (!sample_usable(i)) continue;
      sample_indices.push_back(i);
      const int32_t label = labels.labels.at(u, v);
      if (label == kUnlabeled) continue;
      normal_sum[label] += samples.normal.vectors[i];
      distance_sum[label] += samples.distance.values[i];
      ++counts[label];
    }
  }
  if (sample_indices.empty()) {
    throw InsufficientDataError("planar_fill: no usable samples");
  }

  std::vector<Eigen::Vector3d> fill_normal(segment_count);
  std::vector<double> fill_distance(segment_count, 0.0);
  std::vector<uint8_t> filled(segment_count, 0);
  for (int s = 0; s < segment_count; ++s) {
    if (counts[s] == 0) continue;
    Eigen::Vector3d n = normal_sum[s] / static_cast<double>(counts[s]);
    const double norm = n.norm();
    if (norm > 1e-12) {
      n /= norm;
    } else {
      // Degenerate mean (opposing samples): fall back to the segment's
      // first sample in row-major order.
      for (size_t i : sample_indices) {
        if (labels.labels[i] == s) {
          n = samples.normal.vectors[i];
          break;
        }
      }
    }
    fill_normal[s] = n;
    fill_distance[s] = distance_sum[s] / static_cast<double>(counts[s]);
    filled[s] = 1;
  }

  // Segments without samples copy the nearest sampled pixel: minimal
  // squared distance over (segment pixel, sample) pairs, ties to the
  // sample with the smallest row-major index.
  for (int s = 0; s < segment_count; ++s) {
    if (filled[s]) continue;
    int64_t best_d2 = std::numeric_limits<int64_t>::max();
    size_t best_sample = 0;
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        if (labels.labels.at(u, v) != s) continue;
        for (size_t i : sample_indices) {
          const int64_t su = static_cast<int64_t>(i % w);
          const int64_t sv = static_cast<int64_t>(i / w);
          const int64_t d2 = (su - u) * (su - u) + (sv - v) * (sv - v);
          if (d2 < best_d2 || (d2 == best_d2 && i < best_sample)) {
            best_d2 = d2;
            best_sample = i;
          }
        }
      }
    }
    fill_normal[s] = samples.normal.vectors[best_sample];
    fill_distance[s] = samples.distance.values[best_sample];
    filled[s] = 1;
  }

  NormalMap normals(w, h);
  DistanceMap distances(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int32_t label = labels.labels.at(u, v);
      if (label == kUnlabeled) continue;
      normals.set(u, v, fill_normal[label]);
      distances.set(u, v, fill_distance[label]);
    }
  }
  return {std::move(normals), std::move(distances)};
}

DepthMap complete_depth(const SparseSamples& samples,
                        const SegmentLabelMap& labels,
                        const CameraIntrinsics& K,
                        const std::optional<SpnConfig>& refine_cfg) {
  auto [normals, distances] = planar_fill(samples, labels);
  DepthMap depth = depth_from_normal_distance(normals, distances, K);
  if (!refine_cfg) return depth;

  const SpnConfig& cfg = *refine_cfg;
  const auto offsets =
      cfg.offsets.empty() ? default_8_neighborhood() : cfg.offsets;
  if (!(std::abs(cfg.alpha) < 1.0)) {
    throw ParameterError("complete_depth: alpha must lie in (-1, 1)");
  }
  if (!(cfg.sigma_px > 0.0)) {
    throw ParameterError("complete_depth: sigma_px must be positive");
  }

  const int w = labels.width();
  const int h = labels.height();
  AffinityField affinity;
  affinity.offsets = offsets;
  affinity.weights = Volume(static_cast<int>(offsets.size()), w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int32_t label = labels.labels.at(u, v);
      for (size_t i = 0; i < offsets.size(); ++i) {
        const int qu = u + offsets[i][0];
        const int qv = v + offsets[i][1];
        const bool same_segment = label != kUnlabeled &&
                                  labels.labels.in_bounds(qu, qv) &&
                                  labels.labels.at(qu, qv) == label;
        affinity.weights.at(static_cast<int>(i), u, v) =
            same_segment ? cfg.alpha : 0.0;
      }
    }
  }

  const auto transform = nearest_source_transform(samples.depth.valid);
  UncertaintyMap uncertainty(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double d2 = transform.squared_distance.at(u, v);
      if (d2 == kInf) {
        uncertainty.set(u, v, 1.0);
      } else {
        uncertainty.set(u, v, 1.0 - std::exp(-std::sqrt(d2) / cfg.sigma_px));
      }
    }
  }
  return spn_refine(depth, affinity, uncertainty, cfg.iterations);
}

SegmentLabelMap densify_labels_nearest(const SegmentLabelMap& labels) {
  Mask sources(labels.width(), labels.height(), 0);
  bool any = false;
  for (size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] != kUnlabeled) {
      sources[i] = 1;
      any = true;
    }
  }
  if (!any) return labels;

  const auto transform = nearest_source_transform(sources);
  SegmentLabelMap out = labels;
  for (size_t i = 0; i < out.labels.size(); ++i) {
    if (out.labels[i] != kUnlabeled) continue;
    const int32_t src = transform.source_index[i];
    const int32_t label = labels.labels[src];
    out.labels[i] = label;
    ++out.segment_areas[label];
  }
  // Planar mask reflects the grown areas only if recomputed by the caller.
  return out;
}

}  // namespace nd
