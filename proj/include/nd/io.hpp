// SPDX-License-Identifier: Apache-2.0
#ifndef ND_IO_HPP_
#define ND_IO_HPP_

#include <map>
#include <string>

#include "nd/camera.hpp"
#include "nd/plane_seg.hpp"
#include "nd/refine.hpp"
#include "nd/synth.hpp"
#include "nd/types.hpp"

namespace nd {

enum class DepthFormat { kPfm, kPng16 };
enum class NormalFormat { kPfm3, kPng16x3 };

/// KITTI-style 16-bit PNG depth scale: depth_m = raw / 256.
inline constexpr double kDefaultPngDepthScale = 256.0;

DepthFormat depth_format_from_string(const std::string& name);
NormalFormat normal_format_from_string(const std::string& name);

/// Infers the depth format from the file extension (.pfm / .png).
DepthFormat guess_depth_format(const std::string& path);

// --- Scalar maps -----------------------------------------------------------

/// PFM ("Pf"): 32-bit floats, bottom-to-top rows, scale sign = endianness.
/// Values <= 0 or non-finite read back as invalid pixels.
DepthMap read_depth_pfm(const std::string& path);
void write_depth_pfm(const DepthMap& depth, const std::string& path);

/// 16-bit grayscale PNG; raw 0 is the invalid sentinel, depth = raw / scale.
DepthMap read_depth_png16(const std::string& path,
                          double scale = kDefaultPngDepthScale);
void write_depth_png16(const DepthMap& depth, const std::string& path,
                       double scale = kDefaultPngDepthScale);

DepthMap read_depth(const std::string& path, DepthFormat format,
                    double png_scale = kDefaultPngDepthScale);
void write_depth(const DepthMap& depth, const std::string& path,
                 DepthFormat format,
                 double png_scale = kDefaultPngDepthScale);

/// Distance maps share the PFM scalar layout (invalid pixels stored as NaN
/// so that zero distances survive round trips).
DistanceMap read_distance_pfm(const std::string& path);
void write_distance_pfm(const DistanceMap& dist, const std::string& path);

/// Uncertainty maps as PFM scalars; invalid pixels stored as NaN.
UncertaintyMap read_uncertainty_pfm(const std::string& path);
void write_uncertainty_pfm(const UncertaintyMap& map, const std::string& path);

// --- Normal maps ------------------------------------------------------------

/// Color PFM ("PF"), three f32 channels per pixel. Vectors are renormalized
/// on read when within 1e-2 of unit length, otherwise the pixel is invalid.
NormalMap read_normal_pfm3(const std::string& path);
void write_normal_pfm3(const NormalMap& normals, const std::string& path);

/// 16-bit RGB PNG with channel = round((n + 1) / 2 * 65535).
NormalMap read_normal_png16x3(const std::string& path);
void write_normal_png16x3(const NormalMap& normals, const std::string& path);

NormalMap read_normal(const std::string& path, NormalFormat format);
void write_normal(const NormalMap& normals, const std::string& path,
                  NormalFormat format);

// --- Labels ------------------------------------------------------------------

/// 16-bit grayscale PNG of segment ids; 65535 encodes unlabeled pixels.
SegmentLabelMap read_labels_png16(const std::string& path);
void write_labels_png16(const SegmentLabelMap& labels,
                        const std::string& path);

// --- Point clouds ------------------------------------------------------------

/// ASCII PLY with x y z [nx ny nz] [red green blue].
void export_ply(const PointCloud& cloud, const std::string& path);

// --- Weight container ---------------------------------------------------------

/// Little-endian binary container: magic "NDGW", version u32, then repeated
/// records of (name length u32, name bytes, rank u32, dims u32 each,
/// row-major f32 payload) until end of file.
using TensorMap = std::map<std::string, Tensor>;

TensorMap read_weight_container(const std::string& path);
void write_weight_container(const TensorMap& tensors, const std::string& path);

/// Assembles ConvGRU gate weights from container tensors named
/// update/reset/candidate '.depthwise', '.pointwise' and '.bias'.
ConvGruWeights convgru_weights_from_container(const TensorMap& tensors);

/// Extracts a pointwise projection ('<prefix>.pointwise', '<prefix>.bias').
DeltaProjection delta_projection_from_container(const TensorMap& tensors,
                                                const std::string& prefix);

// --- JSON configuration --------------------------------------------------------

/// Intrinsics as JSON {fx, fy, cx, cy, width, height}; unknown keys rejected.
CameraIntrinsics read_intrinsics_json(const std::string& path);
void write_intrinsics_json(const CameraIntrinsics& K, const std::string& path);

/// Planar scene description (see README for the schema).
PlanarSceneSpec read_scene_spec_json(const std::string& path);

/// Pipeline defaults shared by the CLI subcommands.
struct PipelineConfig {
  int schema_version = 1;
  std::string intrinsics_path;
  double png_depth_scale = kDefaultPngDepthScale;
  double segmentation_k = 1.0;
  int segmentation_min_size = 32;
  int64_t planar_min_area = 200;
  double spn_alpha = 0.1;
  double spn_sigma_px = 16.0;
  int spn_iterations = 6;
  int normal_window = 5;
  long long sample_count = 500;
  uint64_t seed = 0;
};

/// Reads a pipeline configuration; unknown keys are rejected.
PipelineConfig read_pipeline_config_json(const std::string& path);

}  // namespace nd

#endif  // ND_IO_HPP_
