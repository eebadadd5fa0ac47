// SPDX-License-Identifier: Apache-2.0
#include "nd/refine.hpp"

#include <cmath>
#include <set>

namespace nd {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Depthwise 5x5 convolution (zero padding) followed by pointwise mix + bias.
Volume separable_conv5x5(const Volume& in, const SeparableConvWeights& w) {
  const int radius = 2;
  Volume depthwise_out(in.channels, in.width, in.height);
  for (int c = 0; c < in.channels; ++c) {
    const float* kernel = &w.depthwise.data[static_cast<size_t>(c) * 25];
    for (int v = 0; v < in.height; ++v) {
      for (int u = 0; u < in.width; ++u) {
        double acc = 0.0;
        for (int kv = -radius; kv <= radius; ++kv) {
          const int qv = v + kv;
          if (qv < 0 || qv >= in.height) continue;
          for (int ku = -radius; ku <= radius; ++ku) {
            const int qu = u + ku;
            if (qu < 0 || qu >= in.width) continue;
            acc += static_cast<double>(
                       kernel[(kv + radius) * 5 + (ku + radius)]) *
                   in.at(c, qu, qv);
          }
        }
        depthwise_out.at(c, u, v) = acc;
      }
    }
  }

  const int out_channels = w.out_channels();
  Volume out(out_channels, in.width, in.height);
  for (int oc = 0; oc < out_channels; ++oc) {
    const float* mix = &w.pointwise.data[static_cast<size_t>(oc) * in.channels];
    const double bias = static_cast<double>(w.bias.data[oc]);
    for (int v = 0; v < in.height; ++v) {
      for (int u = 0; u < in.width; ++u) {
        double acc = bias;
        for (int c = 0; c < in.channels; ++c) {
          acc += static_cast<double>(mix[c]) * depthwise_out.at(c, u, v);
        }
        out.at(oc, u, v) = acc;
      }
    }
  }
  return out;
}

Volume concat_channels(const Volume& a, const Volume& b) {
  Volume out(a.channels + b.channels, a.width, a.height);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

}  // namespace

void SeparableConvWeights::validate() const {
  if (depthwise.dims.size() != 3 || depthwise.dims[1] != 5 ||
      depthwise.dims[2] != 5) {
    throw ShapeError("separable conv: depthwise kernel must be [C, 5, 5]");
  }
  if (pointwise.dims.size() != 2 || pointwise.dims[1] != depthwise.dims[0]) {
    throw ShapeError("separable conv: pointwise must be [out, in] with in "
                     "matching the depthwise channel count");
  }
  if (bias.dims.size() != 1 || bias.dims[0] != pointwise.dims[0]) {
    throw ShapeError("separable conv: bias must match the output channels");
  }
  if (depthwise.data.size() != depthwise.element_count() ||
      pointwise.data.size() != pointwise.element_count() ||
      bias.data.size() != bias.element_count()) {
    throw ShapeError("separable conv: payload size does not match dims");
  }
}

void ConvGruWeights::validate() const {
  update.validate();
  reset.validate();
  candidate.validate();
  const int in = hidden_channels + input_channels;
  for (const auto* gate : {&update, &reset, &candidate}) {
    if (gate->in_channels() != in || gate->out_channels() != hidden_channels) {
      throw ShapeError("convgru weights: gate channel counts disagree with "
                       "hidden/input channels");
    }
  }
}

void AffinityField::validate() const {
  if (weights.channels != static_cast<int>(offsets.size())) {
    throw ShapeError("affinity field: weight channels must match offsets");
  }
  std::set<std::array<int, 2>> seen;
  for (const auto& o : offsets) {
    if (o[0] == 0 && o[1] == 0) {
      throw ParameterError("affinity field: zero offset");
    }
    if (!seen.insert(o).second) {
      throw ParameterError("affinity field: duplicate offset");
    }
  }
  for (double w : weights.data) {
    if (!(w > -1.0 && w < 1.0)) {
      throw DomainError("affinity field: weight outside (-1, 1)");
    }
  }
}

ValueMap complementary_map(const DepthMap& d1, const DepthMap& d2) {
  detail::require_same_shape(d1.width(), d1.height(), d2.width(), d2.height(),
                             "complementary_map: D1 vs D2");
  ValueMap out(d1.width(), d1.height());
  for (int v = 0; v < d1.height(); ++v) {
    for (int u = 0; u < d1.width(); ++u) {
      if (!d1.is_valid(u, v) || !d2.is_valid(u, v)) continue;
      out.set(u, v, std::abs(d1.values.at(u, v) - d2.values.at(u, v)));
    }
  }
  return out;
}

Volume assemble_refine_input(const DepthMap& d1, const DepthMap& d2,
                             const UncertaintyMap& u1,
                             const UncertaintyMap& u2,
                             const ValueMap& complementary,
                             const Volume* context) {
  const int w = d1.width();
  const int h = d1.height();
  for (const auto& [mw, mh] :
       {std::pair{d2.width(), d2.height()}, std::pair{u1.width(), u1.height()},
        std::pair{u2.width(), u2.height()},
        std::pair{complementary.width(), complementary.height()}}) {
    detail::require_same_shape(w, h, mw, mh, "assemble_refine_input: maps");
  }
  const int context_channels = context ? context->channels : 0;
  if (context) {
    detail::require_same_shape(w, h, context->width, context->height,
                               "assemble_refine_input: context");
  }

  Volume out(5 + context_channels, w, h);
  auto copy_plane = [&](int channel, const auto& map) {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        out.at(channel, u, v) = map.is_valid(u, v) ? map.values.at(u, v) : 0.0;
      }
    }
  };
  copy_plane(0, d1);
  copy_plane(1, d2);
  copy_plane(2, u1);
  copy_plane(3, u2);
  copy_plane(4, complementary);
  if (context) {
    std::copy(context->data.begin(), context->data.end(),
              out.data.begin() + out.index(5, 0, 0));
  }
  return out;
}

Volume convgru_cell(const Volume& hidden, const Volume& input,
                    const ConvGruWeights& w, ConvGruTrace* trace) {
  w.validate();
  if (hidden.channels != w.hidden_channels ||
      input.channels != w.input_channels) {
    throw ShapeError("convgru_cell: hidden/input channel mismatch");
  }
  if (hidden.width != input.width || hidden.height != input.height) {
    throw ShapeError("convgru_cell: hidden and input grids differ in size");
  }

  const Volume stacked = concat_channels(hidden, input);
  Volume z = separable_conv5x5(stacked, w.update);
  Volume r = separable_conv5x5(stacked, w.reset);
  for (double& x : z.data) x = sigmoid(x);
  for (double& x : r.data) x = sigmoid(x);

  Volume gated = hidden;
  for (size_t i = 0; i < gated.data.size(); ++i) gated.data[i] *= r.data[i];
  Volume candidate = separable_conv5x5(concat_channels(gated, input),
                                       w.candidate);
  for (double& x : candidate.data) x = std::tanh(x);

  Volume next = hidden;
  for (size_t i = 0; i < next.data.size(); ++i) {
    next.data[i] =
        (1.0 - z.data[i]) * hidden.data[i] + z.data[i] * candidate.data[i];
  }
  if (trace) {
    trace->update_gate = std::move(z);
    trace->reset_gate = std::move(r);
    trace->candidate = std::move(candidate);
  }
  return next;
}

Volume project_channels(const Volume& hidden, const DeltaProjection& proj) {
  if (proj.pointwise.dims.size() != 2 ||
      static_cast<int>(proj.pointwise.dims[1]) != hidden.channels) {
    throw ShapeError("project_channels: pointwise dims do not match hidden "
                     "channels");
  }
  const int out_channels = static_cast<int>(proj.pointwise.dims[0]);
  if (proj.bias.dims.size() != 1 ||
      static_cast<int>(proj.bias.dims[0]) != out_channels) {
    throw ShapeError("project_channels: bias dims do not match output");
  }
  Volume out(out_channels, hidden.width, hidden.height);
  for (int oc = 0; oc < out_channels; ++oc) {
    const float* mix =
        &proj.pointwise.data[static_cast<size_t>(oc) * hidden.channels];
    const double bias = static_cast<double>(proj.bias.data[oc]);
    for (int v = 0; v < hidden.height; ++v) {
      for (int u = 0; u < hidden.width; ++u) {
        double acc = bias;
        for (int c = 0; c < hidden.channels; ++c) {
          acc += static_cast<double>(mix[c]) * hidden.at(c, u, v);
        }
        out.at(oc, u, v) = acc;
      }
    }
  }
  return out;
}

DepthMap apply_depth_update(const DepthMap& depth, const ValueMap& delta) {
  detail::require_same_shape(depth.width(), depth.height(), delta.width(),
                             delta.height(), "apply_depth_update");
  DepthMap out(depth.width(), depth.height());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.is_valid(u, v)) continue;
      const double d = depth.values.at(u, v) +
                       (delta.is_valid(u, v) ? delta.values.at(u, v) : 0.0);
      if (d > 0.0 && std::isfinite(d)) out.set(u, v, d);
    }
  }
  return out;
}

std::pair<DepthMap, UncertaintyMap> fuse_by_uncertainty(
    const DepthMap& d1, const DepthMap& d2, const UncertaintyMap& u1,
    const UncertaintyMap& u2) {
  const int w = d1.width();
  const int h = d1.height();
  for (const auto& [mw, mh] :
       {std::pair{d2.width(), d2.height()}, std::pair{u1.width(), u1.height()},
        std::pair{u2.width(), u2.height()}}) {
    detail::require_same_shape(w, h, mw, mh, "fuse_by_uncertainty: maps");
  }
  DepthMap depth(w, h);
  UncertaintyMap uncertainty(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!d1.is_valid(u, v) || !d2.is_valid(u, v) || !u1.is_valid(u, v) ||
          !u2.is_valid(u, v)) {
        continue;
      }
      const double a = u1.values.at(u, v);
      const double b = u2.values.at(u, v);
      if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
        throw DomainError("fuse_by_uncertainty: uncertainty outside [0, 1]");
      }
      const double denom = 2.0 - a - b;
      const double w1 = denom > 0.0 ? (1.0 - a) / denom : 0.5;
      const double w2 = 1.0 - w1;
      depth.set(u, v, w1 * d1.values.at(u, v) + w2 * d2.values.at(u, v));
      uncertainty.set(u, v, w1 * a + w2 * b);
    }
  }
  return {std::move(depth), std::move(uncertainty)};
}

DepthMap spn_step(const DepthMap& depth, const AffinityField& affinity) {
  affinity.validate();
  detail::require_same_shape(depth.width(), depth.height(),
                             affinity.weights.width, affinity.weights.height,
                             "spn_step: depth vs affinity");
  const int w = depth.width();
  const int h = depth.height();
  const int k = static_cast<int>(affinity.offsets.size());

  DepthMap out(w, h);
  std::vector<double> weights(k);
  std::vector<double> neighbor_values(k);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!depth.is_valid(u, v)) continue;

      double abs_sum = 0.0;
      for (int i = 0; i < k; ++i) {
        const int qu = u + affinity.offsets[i][0];
        const int qv = v + affinity.offsets[i][1];
        if (depth.valid.in_bounds(qu, qv) && depth.is_valid(qu, qv)) {
          weights[i] = affinity.weights.at(i, u, v);
          neighbor_values[i] = depth.values.at(qu, qv);
        } else {
          weights[i] = 0.0;
          neighbor_values[i] = 0.0;
        }
        abs_sum += std::abs(weights[i]);
      }
      const double scale = abs_sum > 1.0 ? 1.0 / abs_sum : 1.0;

      double neighbor_weight_sum = 0.0;
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        const double wi = weights[i] * scale;
        neighbor_weight_sum += wi;
        acc += wi * neighbor_values[i];
      }
      acc += (1.0 - neighbor_weight_sum) * depth.values.at(u, v);
      out.set(u, v, acc);
    }
  }
  return out;
}

DepthMap spn_refine(const DepthMap& depth, const AffinityField& affinity,
                    const UncertaintyMap& uncertainty, int iterations) {
  if (iterations < 0) {
    throw ParameterError("spn_refine: iterations must be non-negative");
  }
  affinity.validate();
  detail::require_same_shape(depth.width(), depth.height(),
                             uncertainty.width(), uncertainty.height(),
                             "spn_refine: depth vs uncertainty");
  if (iterations == 0) return depth;

  // Modulate each incoming weight by the confidence of its source pixel.
  AffinityField modulated = affinity;
  const int k = static_cast<int>(affinity.offsets.size());
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      for (int i = 0; i < k; ++i) {
        const int qu = u + affinity.offsets[i][0];
        const int qv = v + affinity.offsets[i][1];
        double confidence = 0.0;
        if (uncertainty.valid.in_bounds(qu, qv) &&
            uncertainty.is_valid(qu, qv)) {
          confidence = 1.0 - uncertainty.values.at(qu, qv);
        }
        modulated.weights.at(i, u, v) *= confidence;
      }
    }
  }

  DepthMap current = depth;
  for (int it = 0; it < iterations; ++it) {
    current = spn_step(current, modulated);
  }
  return current;
}

DepthMap average_final(const DepthMap& d1, const DepthMap& d2) {
  detail::require_same_shape(d1.width(), d1.height(), d2.width(), d2.height(),
                             "average_final: D1 vs D2");
  DepthMap out(d1.width(), d1.height());
  for (int v = 0; v < d1.height(); ++v) {
    for (int u = 0; u < d1.width(); ++u) {
      const bool a = d1.is_valid(u, v);
      const bool b = d2.is_valid(u, v);
      if (a && b) {
        out.set(u, v, 0.5 * (d1.values.at(u, v) + d2.values.at(u, v)));
      } else if (a) {
        out.set(u, v, d1.values.at(u, v));
      } else if (b) {
        out.set(u, v, d2.values.at(u, v));
      }
    }
  }
  return out;
}

}  // namespace nd
