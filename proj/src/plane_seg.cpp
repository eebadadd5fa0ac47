// SPDX-License-Identifier: Apache-2.0
#include "nd/plane_seg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nd {

namespace {

/// Union-find forest over pixel indices with component sizes.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  int join(int a, int b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  int64_t size(int root) const { return size_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<int64_t> size_;
};

}  // namespace

EdgeWeightGraph geometric_dissimilarity(const NormalMap& normals,
                                        const DistanceMap& distances) {
  detail::require_same_shape(normals.width(), normals.height(),
                             distances.width(), distances.height(),
                             "geometric_dissimilarity: normals vs distances");
  const int w = normals.width();
  const int h = normals.height();
  EdgeWeightGraph graph(w, h);

  auto joint_valid = [&](int u, int v) {
    return normals.is_valid(u, v) && distances.is_valid(u, v);
  };
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      graph.valid.at(u, v) = joint_valid(u, v) ? 1 : 0;
    }
  }

  // Raw dissimilarities per edge; the weight field temporarily holds dis_N
  // and dis_D is kept alongside until both are normalized.
  struct RawEdge {
    int32_t a, b;
    double dis_n, dis_d;
  };
  std::vector<RawEdge> raw;
  raw.reserve(static_cast<size_t>(w) * h * 4);

  // Four forward directions cover the 8-connected grid without duplicates.
  constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!graph.valid.at(u, v)) continue;
      for (const auto& dir : kDirs) {
        const int qu = u + dir[0];
        const int qv = v + dir[1];
        if (qu < 0 || qu >= w || qv < 0 || qv >= h) continue;
        if (!graph.valid.at(qu, qv)) continue;
        const int32_t ia = static_cast<int32_t>(graph.valid.index(u, v));
        const int32_t ib = static_cast<int32_t>(graph.valid.index(qu, qv));
        const double dis_n =
            (normals.vectors.at(qu, qv) - normals.vectors.at(u, v)).norm();
        const double dis_d = std::abs(distances.values.at(qu, qv) -
                                      distances.values.at(u, v));
        raw.push_back({std::min(ia, ib), std::max(ia, ib), dis_n, dis_d});
      }
    }
  }

  double n_min = std::numeric_limits<double>::infinity();
  double n_max = -std::numeric_limits<double>::infinity();
  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -std::numeric_limits<double>::infinity();
  for (const auto& e : raw) {
    n_min = std::min(n_min, e.dis_n);
    n_max = std::max(n_max, e.dis_n);
    d_min = std::min(d_min, e.dis_d);
    d_max = std::max(d_max, e.dis_d);
  }
  const double n_range = n_max - n_min;
  const double d_range = d_max - d_min;

  graph.edges.reserve(raw.size());
  for (const auto& e : raw) {
    const double wn = n_range > 0.0 ? (e.dis_n - n_min) / n_range : 0.0;
    const double wd = d_range > 0.0 ? (e.dis_d - d_min) / d_range : 0.0;
    graph.edges.push_back({e.a, e.b, wn + wd});
  }
  return graph;
}

SegmentLabelMap felzenszwalb_segment(const EdgeWeightGraph& graph, double k,
                                     int min_size) {
  if (!(k > 0.0)) {
    throw ParameterError("felzenszwalb_segment: k must be positive");
  }
  if (min_size < 1) {
    throw ParameterError("felzenszwalb_segment: min_size must be at least 1");
  }
  const int w = graph.width;
  const int h = graph.height;
  const int n = w * h;

  std::vector<GraphEdge> edges = graph.edges;
  std::stable_sort(edges.begin(), edges.end(),
                   [](const GraphEdge& x, const GraphEdge& y) {
                     if (x.weight != y.weight) return x.weight < y.weight;
                     if (x.a != y.a) return x.a < y.a;
                     return x.b < y.b;
                   });

  DisjointSets sets(n);
  // Per-root merge threshold: internal difference + k / area.
  std::vector<double> threshold(n, k);
  for (const auto& e : edges) {
    const int ra = sets.find(e.a);
    const int rb = sets.find(e.b);
    if (ra == rb) continue;
    if (e.weight <= threshold[ra] && e.weight <= threshold[rb]) {
      const int root = sets.join(ra, rb);
      threshold[root] = e.weight + k / static_cast<double>(sets.size(root));
    }
  }

  // Absorb undersized components across their lightest connecting edges
  // (edges are already sorted ascending).
  for (const auto& e : edges) {
    const int ra = sets.find(e.a);
    const int rb = sets.find(e.b);
    if (ra == rb) continue;
    if (sets.size(ra) < min_size || sets.size(rb) < min_size) {
      sets.join(ra, rb);
    }
  }

  SegmentLabelMap result(w, h);
  std::vector<int32_t> root_label(n, kUnlabeled);
  int32_t next_label = 0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (graph.valid.at(u, v) == 0) continue;
      const int root = sets.find(static_cast<int>(result.labels.index(u, v)));
      if (root_label[root] == kUnlabeled) {
        root_label[root] = next_label++;
        result.segment_areas.push_back(0);
      }
      const int32_t label = root_label[root];
      result.labels.at(u, v) = label;
      ++result.segment_areas[label];
    }
  }
  return result;
}

SegmentLabelMap planar_mask(SegmentLabelMap labels, int64_t min_area) {
  for (int v = 0; v < labels.height(); ++v) {
    for (int u = 0; u < labels.width(); ++u) {
      const int32_t label = labels.labels.at(u, v);
      labels.planar_mask.at(u, v) =
          (label != kUnlabeled && labels.segment_areas[label] > min_area) ? 1
                                                                          : 0;
    }
  }
  return labels;
}

}  // namespace nd
