// SPDX-License-Identifier: Apache-2.0
//
// ndtool: command-line front end for the normal-distance depth toolkit.
// Subcommands compose the library operations into file-to-file pipelines;
// all randomness is controlled by --seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nd/completion.hpp"
#include "nd/geometry.hpp"
#include "nd/io.hpp"
#include "nd/losses.hpp"
#include "nd/metrics.hpp"
#include "nd/plane_seg.hpp"
#include "nd/refine.hpp"
#include "nd/synth.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  nd::PipelineConfig config;
};

void load_config(CommonOptions& common) {
  if (!common.config_path.empty()) {
    common.config = nd::read_pipeline_config_json(common.config_path);
  }
}

nd::CameraIntrinsics load_intrinsics(const std::string& flag_path,
                                     const CommonOptions& common) {
  const std::string& path =
      !flag_path.empty() ? flag_path : common.config.intrinsics_path;
  if (path.empty()) {
    throw nd::ParameterError(
        "an intrinsics file is required (--intrinsics or config)");
  }
  return nd::read_intrinsics_json(path);
}

nd::DepthMap load_depth(const std::string& path, double png_scale) {
  return nd::read_depth(path, nd::guess_depth_format(path), png_scale);
}

void save_depth(const nd::DepthMap& depth, const std::string& path,
                double png_scale) {
  nd::write_depth(depth, path, nd::guess_depth_format(path), png_scale);
}

nd::NormalFormat guess_normal_format(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "pfm") return nd::NormalFormat::kPfm3;
  if (ext == "png") return nd::NormalFormat::kPng16x3;
  throw nd::ParameterError("cannot infer normal format from extension: " +
                           path);
}

int run_synth(const CommonOptions& common, const std::string& spec_path,
              const std::string& out_dir, const std::string& depth_format) {
  auto spec = nd::read_scene_spec_json(spec_path);
  const auto scene = nd::generate_planar_scene(spec);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const bool png = depth_format == "png16" || depth_format == "png";
  const std::string depth_name = png ? "depth.png" : "depth.pfm";
  nd::write_depth(scene.depth, (dir / depth_name).string(),
                  nd::depth_format_from_string(depth_format),
                  common.config.png_depth_scale);
  nd::write_normal_pfm3(scene.normals, (dir / "normal.pfm").string());
  nd::write_distance_pfm(scene.distances, (dir / "distance.pfm").string());
  nd::write_labels_png16(scene.labels, (dir / "labels.png").string());
  nd::write_intrinsics_json(spec.intrinsics, (dir / "intrinsics.json").string());
  std::cout << "wrote scene to " << out_dir << "\n";
  return 0;
}

int run_derive(const CommonOptions& common, const std::string& depth_path,
               const std::string& intrinsics_path, int window,
               const std::string& out_normal, const std::string& out_distance) {
  const auto K = load_intrinsics(intrinsics_path, common);
  const auto depth = load_depth(depth_path, common.config.png_depth_scale);
  const auto normals = nd::normals_from_depth(depth, K, window);
  if (!out_normal.empty()) {
    nd::write_normal(normals, out_normal, guess_normal_format(out_normal));
  }
  if (!out_distance.empty()) {
    const auto distances = nd::distance_from_depth_normal(depth, normals, K);
    nd::write_distance_pfm(distances, out_distance);
  }
  return 0;
}

int run_convert(const CommonOptions& common, const std::string& normal_path,
                const std::string& distance_path,
                const std::string& intrinsics_path, const std::string& out) {
  const auto K = load_intrinsics(intrinsics_path, common);
  const auto normals =
      nd::read_normal(normal_path, guess_normal_format(normal_path));
  const auto distances = nd::read_distance_pfm(distance_path);
  const auto depth = nd::depth_from_normal_distance(normals, distances, K);
  save_depth(depth, out, common.config.png_depth_scale);
  return 0;
}

int run_segment(const CommonOptions& common, const std::string& normal_path,
                const std::string& distance_path, double k, int min_size,
                int64_t min_area, const std::string& out_labels,
                const std::string& out_mask) {
  const auto normals =
      nd::read_normal(normal_path, guess_normal_format(normal_path));
  const auto distances = nd::read_distance_pfm(distance_path);
  const auto graph = nd::geometric_dissimilarity(normals, distances);
  auto labels = nd::felzenszwalb_segment(graph, k, min_size);
  labels = nd::planar_mask(std::move(labels), min_area);
  nd::write_labels_png16(labels, out_labels);
  if (!out_mask.empty()) {
    nd::DepthMap mask_img(labels.width(), labels.height());
    for (int v = 0; v < labels.height(); ++v) {
      for (int u = 0; u < labels.width(); ++u) {
        if (labels.planar_mask.at(u, v)) mask_img.set(u, v, 1.0);
      }
    }
    nd::write_depth_png16(mask_img, out_mask, 255.0);
  }
  std::cout << "segments: " << labels.segment_count() << "\n";
  (void)common;
  return 0;
}

int run_complete(const CommonOptions& common, const std::string& sparse_path,
                 const std::string& intrinsics_path,
                 const std::string& labels_path, int window, double k,
                 int min_size, bool no_spn, double alpha, double sigma_px,
                 int iterations, const std::string& out) {
  const auto K = load_intrinsics(intrinsics_path, common);
  const auto sparse_depth =
      load_depth(sparse_path, common.config.png_depth_scale);

  auto [normals, distances] = nd::sparse_nd_from_sparse_depth(
      sparse_depth, K, window);

  nd::SparseSamples samples;
  samples.depth = sparse_depth;
  samples.normal = normals;
  samples.distance = distances;
  samples.sample_count = sparse_depth.valid_count();

  nd::SegmentLabelMap labels;
  if (!labels_path.empty()) {
    labels = nd::read_labels_png16(labels_path);
  } else {
    // Online plane detection from the sparse estimates, grown to full
    // coverage so that every pixel belongs to a segment.
    const auto graph = nd::geometric_dissimilarity(normals, distances);
    labels = nd::felzenszwalb_segment(graph, k, min_size);
    labels = nd::densify_labels_nearest(labels);
  }

  std::optional<nd::SpnConfig> cfg;
  if (!no_spn) {
    nd::SpnConfig spn;
    spn.alpha = alpha;
    spn.sigma_px = sigma_px;
    spn.iterations = iterations;
    cfg = spn;
  }
  const auto depth = nd::complete_depth(samples, labels, K, cfg);
  save_depth(depth, out, common.config.png_depth_scale);
  return 0;
}

int run_refine(const CommonOptions& common, const std::string& depth_path,
               const std::string& labels_path,
               const std::string& uncertainty_path, double alpha,
               int iterations, const std::string& out) {
  const auto depth = load_depth(depth_path, common.config.png_depth_scale);
  const int w = depth.width();
  const int h = depth.height();

  nd::AffinityField affinity;
  affinity.offsets = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                       {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  affinity.weights =
      nd::Volume(static_cast<int>(affinity.offsets.size()), w, h, alpha);
  if (!labels_path.empty()) {
    const auto labels = nd::read_labels_png16(labels_path);
    nd::detail::require_same_shape(w, h, labels.width(), labels.height(),
                                   "refine: depth vs labels");
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const int32_t label = labels.labels.at(u, v);
        for (size_t i = 0; i < affinity.offsets.size(); ++i) {
          const int qu = u + affinity.offsets[i][0];
          const int qv = v + affinity.offsets[i][1];
          const bool same = label != nd::kUnlabeled &&
                            labels.labels.in_bounds(qu, qv) &&
                            labels.labels.at(qu, qv) == label;
          if (!same) affinity.weights.at(static_cast<int>(i), u, v) = 0.0;
        }
      }
    }
  }

  nd::UncertaintyMap uncertainty(w, h);
  if (!uncertainty_path.empty()) {
    uncertainty = nd::read_uncertainty_pfm(uncertainty_path);
  } else {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) uncertainty.set(u, v, 0.0);
    }
  }

  const auto refined = nd::spn_refine(depth, affinity, uncertainty, iterations);
  save_depth(refined, out, common.config.png_depth_scale);
  return 0;
}

int run_fuse(const CommonOptions& common, const std::string& d1_path,
             const std::string& d2_path, const std::string& u1_path,
             const std::string& u2_path, const std::string& out_depth,
             const std::string& out_uncertainty) {
  const auto d1 = load_depth(d1_path, common.config.png_depth_scale);
  const auto d2 = load_depth(d2_path, common.config.png_depth_scale);
  const auto u1 = nd::read_uncertainty_pfm(u1_path);
  const auto u2 = nd::read_uncertainty_pfm(u2_path);
  const auto [depth, uncertainty] = nd::fuse_by_uncertainty(d1, d2, u1, u2);
  save_depth(depth, out_depth, common.config.png_depth_scale);
  if (!out_uncertainty.empty()) {
    nd::write_uncertainty_pfm(uncertainty, out_uncertainty);
  }
  return 0;
}

int run_eval(const CommonOptions& common,
             const std::vector<std::string>& pred_paths,
             const std::vector<std::string>& gt_paths, double cap_min,
             double cap_max, const std::string& aggregate,
             const std::string& json_out, const std::string& csv_out) {
  if (pred_paths.size() != gt_paths.size() || pred_paths.empty()) {
    throw nd::ParameterError(
        "eval: --pred and --gt must list the same number of files");
  }
  if (aggregate != "per-image" && aggregate != "pooled") {
    throw nd::ParameterError("eval: --aggregate must be per-image or pooled");
  }

  nd::MetricsReport report;
  if (aggregate == "pooled" && pred_paths.size() > 1) {
    // Pool pixels of all images into one evaluation set by stacking maps
    // vertically (all images must agree in width).
    std::vector<nd::DepthMap> preds, gts;
    int total_h = 0, w = -1;
    for (size_t i = 0; i < pred_paths.size(); ++i) {
      preds.push_back(load_depth(pred_paths[i], common.config.png_depth_scale));
      gts.push_back(load_depth(gt_paths[i], common.config.png_depth_scale));
      if (w < 0) w = preds.back().width();
      if (preds.back().width() != w || gts.back().width() != w) {
        throw nd::ParameterError("eval: pooled mode needs equal widths");
      }
      total_h += preds.back().height();
    }
    nd::DepthMap pooled_pred(w, total_h), pooled_gt(w, total_h);
    int offset = 0;
    for (size_t i = 0; i < preds.size(); ++i) {
      for (int v = 0; v < preds[i].height(); ++v) {
        for (int u = 0; u < w; ++u) {
          if (preds[i].is_valid(u, v)) {
            pooled_pred.set(u, offset + v, preds[i].values.at(u, v));
          }
          if (gts[i].is_valid(u, v)) {
            pooled_gt.set(u, offset + v, gts[i].values.at(u, v));
          }
        }
      }
      offset += preds[i].height();
    }
    report = nd::depth_metrics(pooled_pred, pooled_gt, cap_min, cap_max);
  } else {
    // Per-image evaluation, averaged over images (the common benchmark
    // protocol); a single pair reduces to plain evaluation.
    std::vector<nd::MetricsReport> reports;
    for (size_t i = 0; i < pred_paths.size(); ++i) {
      const auto pred = load_depth(pred_paths[i], common.config.png_depth_scale);
      const auto gt = load_depth(gt_paths[i], common.config.png_depth_scale);
      reports.push_back(nd::depth_metrics(pred, gt, cap_min, cap_max));
    }
    report = reports.front();
    if (reports.size() > 1) {
      nd::MetricsReport mean;
      for (const auto& r : reports) {
        mean.abs_rel += r.abs_rel;
        mean.sq_rel += r.sq_rel;
        mean.rmse += r.rmse;
        mean.rmse_log += r.rmse_log;
        mean.log10 += r.log10;
        mean.silog += r.silog;
        mean.irmse += r.irmse;
        mean.mae += r.mae;
        mean.imae += r.imae;
        mean.delta1 += r.delta1;
        mean.delta2 += r.delta2;
        mean.delta3 += r.delta3;
        mean.valid_count += r.valid_count;
      }
      const double n = static_cast<double>(reports.size());
      mean.abs_rel /= n;
      mean.sq_rel /= n;
      mean.rmse /= n;
      mean.rmse_log /= n;
      mean.log10 /= n;
      mean.silog /= n;
      mean.irmse /= n;
      mean.mae /= n;
      mean.imae /= n;
      mean.delta1 /= n;
      mean.delta2 /= n;
      mean.delta3 /= n;
      report = mean;
    }
  }

  const std::string json = report.to_json();
  std::cout << json << "\n";
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw nd::IoError("cannot open " + json_out + " for writing");
    out << json << "\n";
  }
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw nd::IoError("cannot open " + csv_out + " for writing");
    out << nd::MetricsReport::csv_header() << "\n"
        << report.to_csv_row() << "\n";
  }
  return 0;
}

int run_ply(const CommonOptions& common, const std::string& depth_path,
            const std::string& intrinsics_path, const std::string& normal_path,
            const std::string& out) {
  const auto K = load_intrinsics(intrinsics_path, common);
  const auto depth = load_depth(depth_path, common.config.png_depth_scale);
  nd::PointCloud cloud = nd::backproject(depth, K);
  if (!normal_path.empty()) {
    const auto normals =
        nd::read_normal(normal_path, guess_normal_format(normal_path));
    nd::detail::require_same_shape(depth.width(), depth.height(),
                                   normals.width(), normals.height(),
                                   "ply: depth vs normals");
    cloud.normals.reserve(cloud.points.size());
    for (int v = 0; v < depth.height(); ++v) {
      for (int u = 0; u < depth.width(); ++u) {
        if (!depth.is_valid(u, v)) continue;
        cloud.normals.push_back(normals.is_valid(u, v)
                                    ? normals.vectors.at(u, v)
                                    : Eigen::Vector3d::Zero());
      }
    }
  }
  nd::export_ply(cloud, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal-distance assisted depth estimation and completion "
               "toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--config", common.config_path,
                 "Pipeline configuration JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a planar scene");
  std::string spec_path, out_dir, depth_format = "pfm";
  synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--depth-format", depth_format, "pfm or png16");

  // derive
  auto* derive = app.add_subcommand(
      "derive", "Estimate normals and plane distances from depth");
  std::string depth_path, intrinsics_path, out_normal, out_distance;
  int window = 5;
  derive->add_option("--depth", depth_path, "Input depth map")->required();
  derive->add_option("--intrinsics", intrinsics_path, "Intrinsics JSON");
  derive->add_option("--window", window, "Plane-fit window (odd)");
  derive->add_option("--out-normal", out_normal, "Output normal map");
  derive->add_option("--out-distance", out_distance, "Output distance map");

  // convert
  auto* convert = app.add_subcommand(
      "convert", "Depth from normal and distance maps");
  std::string normal_path, distance_path, out_path;
  convert->add_option("--normal", normal_path, "Normal map")->required();
  convert->add_option("--distance", distance_path, "Distance map")->required();
  convert->add_option("--intrinsics", intrinsics_path, "Intrinsics JSON");
  convert->add_option("--out", out_path, "Output depth map")->required();

  // segment
  auto* segment = app.add_subcommand(
      "segment", "Plane detection from normal and distance maps");
  double seg_k = 1.0;
  int seg_min_size = 32;
  int64_t seg_min_area = 200;
  std::string out_labels, out_mask;
  segment->add_option("--normal", normal_path, "Normal map")->required();
  segment->add_option("--distance", distance_path, "Distance map")->required();
  segment->add_option("--k", seg_k, "Felzenszwalb scale");
  segment->add_option("--min-size", seg_min_size, "Minimum segment size");
  segment->add_option("--min-area", seg_min_area, "Planar-region area gate");
  segment->add_option("--out-labels", out_labels, "Label PNG")->required();
  segment->add_option("--out-mask", out_mask, "Planar-mask PNG");

  // complete
  auto* complete = app.add_subcommand(
      "complete", "Dense depth from a sparse depth map");
  std::string labels_path;
  bool no_spn = false;
  double alpha = 0.1, sigma_px = 16.0;
  int iterations = 6;
  complete->add_option("--sparse-depth", depth_path, "Sparse depth map")
      ->required();
  complete->add_option("--intrinsics", intrinsics_path, "Intrinsics JSON");
  complete->add_option("--labels", labels_path,
                       "External segment labels (PNG); otherwise derive from "
                       "the sparse data");
  complete->add_option("--window", window, "Sparse plane-fit window (odd)");
  complete->add_option("--k", seg_k, "Felzenszwalb scale");
  complete->add_option("--min-size", seg_min_size, "Minimum segment size");
  complete->add_flag("--no-spn", no_spn, "Skip propagation refinement");
  complete->add_option("--alpha", alpha, "In-segment affinity weight");
  complete->add_option("--sigma", sigma_px, "Uncertainty distance scale (px)");
  complete->add_option("--iterations", iterations, "Propagation iterations");
  complete->add_option("--out", out_path, "Output depth map")->required();

  // refine
  auto* refine = app.add_subcommand("refine", "Propagation on a depth map");
  std::string uncertainty_path;
  refine->add_option("--depth", depth_path, "Input depth map")->required();
  refine->add_option("--labels", labels_path, "Segment labels (PNG)");
  refine->add_option("--uncertainty", uncertainty_path, "Uncertainty (PFM)");
  refine->add_option("--alpha", alpha, "Neighbor affinity weight");
  refine->add_option("--iterations", iterations, "Propagation iterations");
  refine->add_option("--out", out_path, "Output depth map")->required();

  // fuse
  auto* fuse = app.add_subcommand(
      "fuse", "Uncertainty-weighted fusion of two depth maps");
  std::string d2_path, u1_path, u2_path, out_uncertainty;
  fuse->add_option("--d1", depth_path, "First depth map")->required();
  fuse->add_option("--d2", d2_path, "Second depth map")->required();
  fuse->add_option("--u1", u1_path, "First uncertainty map")->required();
  fuse->add_option("--u2", u2_path, "Second uncertainty map")->required();
  fuse->add_option("--out", out_path, "Fused depth map")->required();
  fuse->add_option("--out-uncertainty", out_uncertainty,
                   "Fused uncertainty map");

  // eval
  auto* eval = app.add_subcommand("eval", "Depth metrics report");
  std::vector<std::string> pred_paths, gt_paths;
  double cap_min = 0.0, cap_max = 80.0;
  std::string aggregate = "per-image", json_out, csv_out;
  eval->add_option("--pred", pred_paths, "Predicted depth map(s)")->required();
  eval->add_option("--gt", gt_paths, "Ground-truth depth map(s)")->required();
  eval->add_option("--cap-min", cap_min, "Lower evaluation cap (exclusive)");
  eval->add_option("--cap-max", cap_max, "Upper evaluation cap (inclusive)");
  eval->add_option("--aggregate", aggregate, "per-image or pooled");
  eval->add_option("--json", json_out, "Write the report as JSON");
  eval->add_option("--csv", csv_out, "Write the report as CSV");

  // ply
  auto* ply = app.add_subcommand("ply", "Export a point cloud");
  ply->add_option("--depth", depth_path, "Depth map")->required();
  ply->add_option("--intrinsics", intrinsics_path, "Intrinsics JSON");
  ply->add_option("--normal", normal_path, "Optional normal map");
  ply->add_option("--out", out_path, "Output PLY")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 1;
  }

  try {
    load_config(common);
    if (synth->parsed()) {
      return run_synth(common, spec_path, out_dir, depth_format);
    }
    if (derive->parsed()) {
      return run_derive(common, depth_path, intrinsics_path, window,
                        out_normal, out_distance);
    }
    if (convert->parsed()) {
      return run_convert(common, normal_path, distance_path, intrinsics_path,
                         out_path);
    }
    if (segment->parsed()) {
      return run_segment(common, normal_path, distance_path, seg_k,
                         seg_min_size, seg_min_area, out_labels, out_mask);
    }
    if (complete->parsed()) {
      return run_complete(common, depth_path, intrinsics_path, labels_path,
                          window, seg_k, seg_min_size, no_spn, alpha, sigma_px,
                          iterations, out_path);
    }
    if (refine->parsed()) {
      return run_refine(common, depth_path, labels_path, uncertainty_path,
                        alpha, iterations, out_path);
    }
    if (fuse->parsed()) {
      return run_fuse(common, depth_path, d2_path, u1_path, u2_path, out_path,
                      out_uncertainty);
    }
    if (eval->parsed()) {
      return run_eval(common, pred_paths, gt_paths, cap_min, cap_max,
                      aggregate, json_out, csv_out);
    }
    if (ply->parsed()) {
      return run_ply(common, depth_path, intrinsics_path, normal_path,
                     out_path);
    }
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const nd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // input/domain problem
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
