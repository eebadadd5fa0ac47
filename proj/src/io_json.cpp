// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <set>

#include <json.hpp>

#include "nd/io.hpp"

namespace nd {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) {
    throw IoError(where + ": expected a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw IoError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& obj, const std::string& key,
               const std::string& where) {
  if (!obj.contains(key)) {
    throw IoError(where + ": missing required key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(where + "." + key + ": " + e.what());
  }
}

CameraIntrinsics intrinsics_from_json(const json& obj,
                                      const std::string& where) {
  reject_unknown_keys(obj, {"fx", "fy", "cx", "cy", "width", "height"}, where);
  try {
    return CameraIntrinsics(
        get_required<double>(obj, "fx", where),
        get_required<double>(obj, "fy", where),
        get_required<double>(obj, "cx", where),
        get_required<double>(obj, "cy", where),
        get_required<int>(obj, "width", where),
        get_required<int>(obj, "height", where));
  } catch (const ParameterError& e) {
    throw IoError(where + ": " + e.what());
  }
}

}  // namespace

CameraIntrinsics read_intrinsics_json(const std::string& path) {
  return intrinsics_from_json(load_json(path), path);
}

void write_intrinsics_json(const CameraIntrinsics& K,
                           const std::string& path) {
  json obj;
  obj["fx"] = K.fx;
  obj["fy"] = K.fy;
  obj["cx"] = K.cx;
  obj["cy"] = K.cy;
  obj["width"] = K.width;
  obj["height"] = K.height;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << obj.dump(2) << "\n";
}

PlanarSceneSpec read_scene_spec_json(const std::string& path) {
  const json root = load_json(path);
  reject_unknown_keys(root,
                      {"intrinsics", "planes", "noise_sigma", "seed",
                       "planar_min_area"},
                      path);

  PlanarSceneSpec spec;
  if (!root.contains("intrinsics")) {
    throw IoError(path + ": missing required key 'intrinsics'");
  }
  spec.intrinsics =
      intrinsics_from_json(root.at("intrinsics"), path + ".intrinsics");
  spec.noise_sigma = get_or<double>(root, "noise_sigma", 0.0);
  spec.seed = get_or<uint64_t>(root, "seed", 0);
  spec.planar_min_area = get_or<int>(root, "planar_min_area", 0);

  if (!root.contains("planes") || !root.at("planes").is_array() ||
      root.at("planes").empty()) {
    throw IoError(path + ": 'planes' must be a non-empty array");
  }
  for (const auto& plane_json : root.at("planes")) {
    reject_unknown_keys(plane_json, {"normal", "distance", "region"},
                        path + ".planes[]");
    ScenePlane plane;
    const auto n =
        get_required<std::vector<double>>(plane_json, "normal", path);
    if (n.size() != 3) {
      throw IoError(path + ": plane normal must have 3 components");
    }
    plane.normal = Eigen::Vector3d(n[0], n[1], n[2]);
    const double norm = plane.normal.norm();
    if (!(norm > 1e-12)) {
      throw IoError(path + ": plane normal must be nonzero");
    }
    plane.normal /= norm;
    plane.distance = get_required<double>(plane_json, "distance", path);
    if (!(plane.distance >= 0.0)) {
      throw IoError(path + ": plane distance must be non-negative");
    }

    if (!plane_json.contains("region")) {
      throw IoError(path + ": plane missing 'region'");
    }
    const json& region = plane_json.at("region");
    const auto type = get_required<std::string>(region, "type", path);
    if (type == "rect") {
      reject_unknown_keys(region, {"type", "x0", "y0", "x1", "y1"},
                          path + ".region");
      plane.region = RegionRect{get_required<int>(region, "x0", path),
                                get_required<int>(region, "y0", path),
                                get_required<int>(region, "x1", path),
                                get_required<int>(region, "y1", path)};
    } else if (type == "half_plane") {
      reject_unknown_keys(region, {"type", "a", "b", "c"}, path + ".region");
      plane.region = RegionHalfPlane{get_required<double>(region, "a", path),
                                     get_required<double>(region, "b", path),
                                     get_required<double>(region, "c", path)};
    } else {
      throw IoError(path + ": unknown region type '" + type + "'");
    }
    spec.planes.push_back(std::move(plane));
  }
  return spec;
}

PipelineConfig read_pipeline_config_json(const std::string& path) {
  const json root = load_json(path);
  reject_unknown_keys(root,
                      {"schema_version", "intrinsics", "formats",
                       "segmentation", "spn", "normal_window", "sampling"},
                      path);
  PipelineConfig cfg;
  cfg.schema_version = get_required<int>(root, "schema_version", path);
  if (cfg.schema_version != 1) {
    throw IoError(path + ": unsupported schema_version");
  }
  cfg.intrinsics_path = get_or<std::string>(root, "intrinsics", "");
  cfg.normal_window = get_or<int>(root, "normal_window", cfg.normal_window);

  if (root.contains("formats")) {
    const json& formats = root.at("formats");
    reject_unknown_keys(formats, {"png_depth_scale"}, path + ".formats");
    cfg.png_depth_scale =
        get_or<double>(formats, "png_depth_scale", cfg.png_depth_scale);
  }
  if (root.contains("segmentation")) {
    const json& seg = root.at("segmentation");
    reject_unknown_keys(seg, {"k", "min_size", "planar_min_area"},
                        path + ".segmentation");
    cfg.segmentation_k = get_or<double>(seg, "k", cfg.segmentation_k);
    cfg.segmentation_min_size =
        get_or<int>(seg, "min_size", cfg.segmentation_min_size);
    cfg.planar_min_area =
        get_or<int64_t>(seg, "planar_min_area", cfg.planar_min_area);
  }
  if (root.contains("spn")) {
    const json& spn = root.at("spn");
    reject_unknown_keys(spn, {"alpha", "sigma_px", "iterations"},
                        path + ".spn");
    cfg.spn_alpha = get_or<double>(spn, "alpha", cfg.spn_alpha);
    cfg.spn_sigma_px = get_or<double>(spn, "sigma_px", cfg.spn_sigma_px);
    cfg.spn_iterations = get_or<int>(spn, "iterations", cfg.spn_iterations);
  }
  if (root.contains("sampling")) {
    const json& sampling = root.at("sampling");
    reject_unknown_keys(sampling, {"count", "seed"}, path + ".sampling");
    cfg.sample_count =
        get_or<long long>(sampling, "count", cfg.sample_count);
    cfg.seed = get_or<uint64_t>(sampling, "seed", cfg.seed);
  }
  return cfg;
}

}  // namespace nd
