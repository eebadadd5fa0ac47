// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "nd/io.hpp"

namespace nd {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

/// Raw 16-bit image, samples in host order, channels interleaved.
struct Image16 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint16_t> samples;

  uint16_t& at(int u, int v, int c) {
    return samples[(static_cast<size_t>(v) * width + u) * channels + c];
  }
  uint16_t at(int u, int v, int c) const {
    return samples[(static_cast<size_t>(v) * width + u) * channels + c];
  }
};

Image16 read_png16(const std::string& path, int expected_channels) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  const int channels = png_get_channels(png, info);
  if (bit_depth != 16 ||
      (expected_channels == 1 && color_type != PNG_COLOR_TYPE_GRAY) ||
      (expected_channels == 3 && color_type != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path + ": expected a 16-bit " +
                  (expected_channels == 1 ? "grayscale" : "RGB") + " PNG");
  }

  Image16 image;
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.channels = channels;
  image.samples.resize(static_cast<size_t>(image.width) * image.height *
                       channels);

  png_set_swap(png);  // PNG samples are big-endian
  std::vector<png_bytep> rows(image.height);
  for (int v = 0; v < image.height; ++v) {
    rows[v] = reinterpret_cast<png_bytep>(
        image.samples.data() + static_cast<size_t>(v) * image.width * channels);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png16(const Image16& image, const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path);
  }
  png_init_io(png, file.get());
  // Fixed filter and compression settings keep the output byte-stable.
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, image.width, image.height, 16,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);

  std::vector<png_bytep> rows(image.height);
  for (int v = 0; v < image.height; ++v) {
    rows[v] = reinterpret_cast<png_bytep>(const_cast<uint16_t*>(
        image.samples.data() +
        static_cast<size_t>(v) * image.width * image.channels));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

DepthMap read_depth_png16(const std::string& path, double scale) {
  if (!(scale > 0.0)) {
    throw ParameterError("read_depth_png16: scale must be positive");
  }
  const Image16 image = read_png16(path, 1);
  DepthMap depth(image.width, image.height);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    const uint16_t raw = image.samples[i];
    if (raw == 0) continue;  // invalid sentinel
    depth.values[i] = static_cast<double>(raw) / scale;
    depth.valid[i] = 1;
  }
  return depth;
}

void write_depth_png16(const DepthMap& depth, const std::string& path,
                       double scale) {
  if (!(scale > 0.0)) {
    throw ParameterError("write_depth_png16: scale must be positive");
  }
  Image16 image;
  image.width = depth.width();
  image.height = depth.height();
  image.channels = 1;
  image.samples.resize(depth.values.size(), 0);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    if (!depth.valid[i]) continue;
    const double raw = std::round(depth.values[i] * scale);
    // Values that quantize to the invalid sentinel or overflow saturate.
    image.samples[i] =
        static_cast<uint16_t>(std::min(std::max(raw, 1.0), 65535.0));
  }
  write_png16(image, path);
}

NormalMap read_normal_png16x3(const std::string& path) {
  const Image16 image = read_png16(path, 3);
  NormalMap normals(image.width, image.height);
  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      Eigen::Vector3d n;
      for (int c = 0; c < 3; ++c) {
        n[c] = 2.0 * static_cast<double>(image.at(u, v, c)) / 65535.0 - 1.0;
      }
      const double norm = n.norm();
      if (std::abs(norm - 1.0) <= 1e-6) {
        normals.set(u, v, n);
      } else if (std::abs(norm - 1.0) <= 1e-2) {
        normals.set(u, v, n / norm);
      }
    }
  }
  return normals;
}

void write_normal_png16x3(const NormalMap& normals, const std::string& path) {
  Image16 image;
  image.width = normals.width();
  image.height = normals.height();
  image.channels = 3;
  // Invalid pixels store the encoding of (0, 0, 0), which reads back as
  // invalid (far from unit norm).
  image.samples.resize(normals.vectors.size() * 3, 32768);
  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      if (!normals.is_valid(u, v)) continue;
      const Eigen::Vector3d& n = normals.vectors.at(u, v);
      for (int c = 0; c < 3; ++c) {
        const double encoded = std::lround((n[c] + 1.0) / 2.0 * 65535.0);
        image.at(u, v, c) =
            static_cast<uint16_t>(std::min(std::max(encoded, 0.0), 65535.0));
      }
    }
  }
  write_png16(image, path);
}

SegmentLabelMap read_labels_png16(const std::string& path) {
  const Image16 image = read_png16(path, 1);
  SegmentLabelMap labels(image.width, image.height);
  int32_t max_label = -1;
  for (size_t i = 0; i < labels.labels.size(); ++i) {
    const uint16_t raw = image.samples[i];
    if (raw == 65535) continue;  // unlabeled sentinel
    labels.labels[i] = static_cast<int32_t>(raw);
    max_label = std::max(max_label, labels.labels[i]);
  }
  labels.segment_areas.assign(static_cast<size_t>(max_label + 1), 0);
  for (size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] != kUnlabeled) {
      ++labels.segment_areas[labels.labels[i]];
    }
  }
  return labels;
}

void write_labels_png16(const SegmentLabelMap& labels,
                        const std::string& path) {
  Image16 image;
  image.width = labels.width();
  image.height = labels.height();
  image.channels = 1;
  image.samples.resize(labels.labels.size());
  for (size_t i = 0; i < labels.labels.size(); ++i) {
    const int32_t label = labels.labels[i];
    if (label == kUnlabeled) {
      image.samples[i] = 65535;
    } else if (label >= 0 && label < 65535) {
      image.samples[i] = static_cast<uint16_t>(label);
    } else {
      throw IoError("write_labels_png16: label " + std::to_string(label) +
                    " does not fit 16-bit encoding");
    }
  }
  write_png16(image, path);
}

DepthFormat depth_format_from_string(const std::string& name) {
  if (name == "pfm") return DepthFormat::kPfm;
  if (name == "png16" || name == "png") return DepthFormat::kPng16;
  throw ParameterError("unknown depth format: " + name);
}

NormalFormat normal_format_from_string(const std::string& name) {
  if (name == "pfm3" || name == "pfm") return NormalFormat::kPfm3;
  if (name == "png16x3" || name == "png") return NormalFormat::kPng16x3;
  throw ParameterError("unknown normal format: " + name);
}

DepthFormat guess_depth_format(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "pfm") return DepthFormat::kPfm;
  if (ext == "png") return DepthFormat::kPng16;
  throw ParameterError("cannot infer depth format from extension: " + path);
}

DepthMap read_depth(const std::string& path, DepthFormat format,
                    double png_scale) {
  return format == DepthFormat::kPfm ? read_depth_pfm(path)
                                     : read_depth_png16(path, png_scale);
}

void write_depth(const DepthMap& depth, const std::string& path,
                 DepthFormat format, double png_scale) {
  if (format == DepthFormat::kPfm) {
    write_depth_pfm(depth, path);
  } else {
    write_depth_png16(depth, path, png_scale);
  }
}

NormalMap read_normal(const std::string& path, NormalFormat format) {
  return format == NormalFormat::kPfm3 ? read_normal_pfm3(path)
                                       : read_normal_png16x3(path);
}

void write_normal(const NormalMap& normals, const std::string& path,
                  NormalFormat format) {
  if (format == NormalFormat::kPfm3) {
    write_normal_pfm3(normals, path);
  } else {
    write_normal_png16x3(normals, path);
  }
}

}  // namespace nd
