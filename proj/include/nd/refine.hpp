// SPDX-License-Identifier: Apache-2.0
#ifndef ND_REFINE_HPP_
#define ND_REFINE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nd/types.hpp"

namespace nd {

/// Named tensor with row-major f32 payload, as stored in weight containers.
struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> data;

  size_t element_count() const {
    size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return n;
  }
};

/// Separable 5x5 convolution: per-channel depthwise 5x5 kernel followed by
/// a pointwise channel mix and bias.
struct SeparableConvWeights {
  Tensor depthwise;  // [in_channels, 5, 5]
  Tensor pointwise;  // [out_channels, in_channels]
  Tensor bias;       // [out_channels]

  int in_channels() const { return static_cast<int>(depthwise.dims[0]); }
  int out_channels() const { return static_cast<int>(pointwise.dims[0]); }
  void validate() const;
};

/// Gate weights of the convolutional GRU cell. Each gate maps the
/// concatenated (hidden, input) channels to hidden channels.
struct ConvGruWeights {
  SeparableConvWeights update;     // W_z
  SeparableConvWeights reset;      // W_r
  SeparableConvWeights candidate;  // W_h
  int hidden_channels = 0;
  int input_channels = 0;

  void validate() const;
};

/// Pointwise projection of the hidden state to per-pixel depth updates.
struct DeltaProjection {
  Tensor pointwise;  // [out_channels, hidden_channels]
  Tensor bias;       // [out_channels]
};

/// Optional capture of the cell's intermediate activations.
struct ConvGruTrace {
  Volume update_gate;
  Volume reset_gate;
  Volume candidate;
};

/// Non-local affinity field: k integer neighbor offsets plus one weight per
/// pixel per offset, each strictly inside (-1, 1).
struct AffinityField {
  std::vector<std::array<int, 2>> offsets;  // (du, dv), nonzero, distinct
  Volume weights;                           // [k, height, width]

  void validate() const;
};

/// Per-pixel absolute difference |D1 - D2| of the two heads' predictions.
ValueMap complementary_map(const DepthMap& d1, const DepthMap& d2);

/// Stacks the refinement inputs (two depths, two uncertainties, the
/// complementary map, optional extra context channels) into one volume.
/// Invalid pixels contribute 0.
Volume assemble_refine_input(const DepthMap& d1, const DepthMap& d2,
                             const UncertaintyMap& u1,
                             const UncertaintyMap& u2,
                             const ValueMap& complementary,
                             const Volume* context = nullptr);

/// One ConvGRU step: z = sigma(conv([h, x])), r = sigma(conv([h, x])),
/// candidate = tanh(conv([r*h, x])), h' = (1 - z)*h + z*candidate.
/// Border handling is zero padding for the 5x5 support.
Volume convgru_cell(const Volume& hidden, const Volume& input,
                    const ConvGruWeights& w, ConvGruTrace* trace = nullptr);

/// Pointwise projection of a hidden volume (e.g. to depth-update channels).
Volume project_channels(const Volume& hidden, const DeltaProjection& proj);

/// Additive depth update D + delta; results that are non-positive or
/// non-finite become invalid.
DepthMap apply_depth_update(const DepthMap& depth, const ValueMap& delta);

/// Uncertainty-weighted fusion of two depth/uncertainty pairs:
/// W1 = (1-U1)/(2-U1-U2), W2 = 1 - W1. Both uncertainties equal to 1 fall
/// back to equal weights.
std::pair<DepthMap, UncertaintyMap> fuse_by_uncertainty(
    const DepthMap& d1, const DepthMap& d2, const UncertaintyMap& u1,
    const UncertaintyMap& u2);

/// One spatial-propagation step: out(p) = W_p * D(p) + sum_i w_i * D(p + o_i)
/// with W_p = 1 - sum_i w_i. Neighbors outside the image (or invalid)
/// contribute weight 0; if sum |w_i| > 1 at a pixel the weights are
/// pre-normalized by that sum.
DepthMap spn_step(const DepthMap& depth, const AffinityField& affinity);

/// Iterated spatial propagation with uncertainty modulation: each neighbor
/// weight is scaled by (1 - U(neighbor)) once up front, then spn_step is
/// applied `iterations` times.
DepthMap spn_refine(const DepthMap& depth, const AffinityField& affinity,
                    const UncertaintyMap& uncertainty, int iterations);

/// Mean of the two final heads; pixels valid in only one map pass through.
DepthMap average_final(const DepthMap& d1, const DepthMap& d2);

}  // namespace nd

#endif  // ND_REFINE_HPP_
