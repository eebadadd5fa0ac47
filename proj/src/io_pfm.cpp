// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "nd/io.hpp"

namespace nd {

namespace {

struct PfmHeader {
  bool color = false;
  int width = 0;
  int height = 0;
  bool little_endian = true;
  size_t data_offset = 0;
};

std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> buffer(static_cast<size_t>(size));
  if (size > 0) in.read(buffer.data(), size);
  if (!in) throw IoError("cannot read " + path);
  return buffer;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

/// Reads one whitespace-delimited header token starting at `pos`;
/// advances `pos` past the single whitespace character that terminates it.
std::string next_token(const std::vector<char>& buf, size_t& pos,
                       const std::string& path) {
  while (pos < buf.size() && is_space(buf[pos])) ++pos;
  const size_t start = pos;
  while (pos < buf.size() && !is_space(buf[pos])) ++pos;
  if (start == pos) throw IoError("truncated PFM header in " + path);
  std::string token(&buf[start], pos - start);
  if (pos < buf.size()) ++pos;  // consume exactly one separator
  return token;
}

PfmHeader parse_pfm_header(const std::vector<char>& buf,
                           const std::string& path) {
  size_t pos = 0;
  PfmHeader header;
  const std::string magic = next_token(buf, pos, path);
  if (magic == "PF") {
    header.color = true;
  } else if (magic == "Pf") {
    header.color = false;
  } else {
    throw IoError("not a PFM file: " + path);
  }
  try {
    header.width = std::stoi(next_token(buf, pos, path));
    header.height = std::stoi(next_token(buf, pos, path));
    const double scale = std::stod(next_token(buf, pos, path));
    header.little_endian = scale < 0.0;
  } catch (const std::exception&) {
    throw IoError("malformed PFM header in " + path);
  }
  if (header.width <= 0 || header.height <= 0 ||
      static_cast<int64_t>(header.width) * header.height > (1LL << 30)) {
    throw IoError("bad PFM dimensions in " + path);
  }
  header.data_offset = pos;
  return header;
}

float byteswap(float value) {
  uint32_t bits;
  std::memcpy(&bits, &value, 4);
  bits = ((bits & 0x000000ffu) << 24) | ((bits & 0x0000ff00u) << 8) |
         ((bits & 0x00ff0000u) >> 8) | ((bits & 0xff000000u) >> 24);
  std::memcpy(&value, &bits, 4);
  return value;
}

/// Loads the payload as floats in top-to-bottom row order.
std::vector<float> read_pfm_payload(const std::string& path, bool color,
                                    int& width, int& height) {
  const auto buf = read_file(path);
  const auto header = parse_pfm_header(buf, path);
  if (header.color != color) {
    throw IoError(path + (color ? " is not a color PFM"
                                : " is not a grayscale PFM"));
  }
  width = header.width;
  height = header.height;
  const size_t channels = color ? 3 : 1;
  const size_t count = static_cast<size_t>(width) * height * channels;
  if (buf.size() - header.data_offset < count * 4) {
    throw IoError("truncated PFM payload in " + path);
  }

  std::vector<float> values(count);
  const char* src = buf.data() + header.data_offset;
  // PFM stores the bottom row first.
  for (int v = 0; v < height; ++v) {
    const int file_row = height - 1 - v;
    std::memcpy(values.data() + static_cast<size_t>(v) * width * channels,
                src + static_cast<size_t>(file_row) * width * channels * 4,
                static_cast<size_t>(width) * channels * 4);
  }
  if (!header.little_endian) {
    for (float& f : values) f = byteswap(f);
  }
  return values;
}

/// Writes floats (given top-to-bottom) as a little-endian PFM.
void write_pfm_payload(const std::string& path, bool color, int width,
                       int height, const std::vector<float>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (color ? "PF" : "Pf") << "\n" << width << " " << height << "\n"
      << "-1.0\n";
  const size_t channels = color ? 3 : 1;
  for (int v = height - 1; v >= 0; --v) {
    out.write(reinterpret_cast<const char*>(
                  values.data() + static_cast<size_t>(v) * width * channels),
              static_cast<std::streamsize>(width * channels * 4));
  }
  if (!out) throw IoError("cannot write " + path);
}

constexpr float kInvalidSentinel = std::numeric_limits<float>::quiet_NaN();

template <typename Map>
void write_scalar_pfm_nan(const Map& map, const std::string& path) {
  std::vector<float> values(map.values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = map.valid[i] ? static_cast<float>(map.values[i])
                             : kInvalidSentinel;
  }
  write_pfm_payload(path, false, map.width(), map.height(), values);
}

template <typename Map>
Map read_scalar_pfm_nan(const std::string& path) {
  int w = 0, h = 0;
  const auto values = read_pfm_payload(path, false, w, h);
  Map map(w, h);
  for (size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) {
      map.values[i] = static_cast<double>(values[i]);
      map.valid[i] = 1;
    }
  }
  return map;
}

}  // namespace

DepthMap read_depth_pfm(const std::string& path) {
  int w = 0, h = 0;
  const auto values = read_pfm_payload(path, false, w, h);
  DepthMap depth(w, h);
  for (size_t i = 0; i < values.size(); ++i) {
    const float f = values[i];
    if (std::isfinite(f) && f > 0.0f) {
      depth.values[i] = static_cast<double>(f);
      depth.valid[i] = 1;
    }
  }
  return depth;
}

void write_depth_pfm(const DepthMap& depth, const std::string& path) {
  std::vector<float> values(depth.values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = depth.valid[i] ? static_cast<float>(depth.values[i]) : 0.0f;
  }
  write_pfm_payload(path, false, depth.width(), depth.height(), values);
}

DistanceMap read_distance_pfm(const std::string& path) {
  return read_scalar_pfm_nan<DistanceMap>(path);
}

void write_distance_pfm(const DistanceMap& dist, const std::string& path) {
  write_scalar_pfm_nan(dist, path);
}

UncertaintyMap read_uncertainty_pfm(const std::string& path) {
  return read_scalar_pfm_nan<UncertaintyMap>(path);
}

void write_uncertainty_pfm(const UncertaintyMap& map,
                           const std::string& path) {
  write_scalar_pfm_nan(map, path);
}

NormalMap read_normal_pfm3(const std::string& path) {
  int w = 0, h = 0;
  const auto values = read_pfm_payload(path, true, w, h);
  NormalMap normals(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t base = (static_cast<size_t>(v) * w + u) * 3;
      const Eigen::Vector3d n(values[base], values[base + 1],
                              values[base + 2]);
      if (!n.allFinite()) continue;
      const double norm = n.norm();
      if (std::abs(norm - 1.0) <= 1e-6) {
        // Already unit to map precision; keep raw bits so that
        // write(read(x)) stays byte-identical.
        normals.set(u, v, n);
      } else if (std::abs(norm - 1.0) <= 1e-2) {
        normals.set(u, v, n / norm);
      }
    }
  }
  return normals;
}

void write_normal_pfm3(const NormalMap& normals, const std::string& path) {
  std::vector<float> values(normals.vectors.size() * 3, 0.0f);
  for (size_t i = 0; i < normals.vectors.size(); ++i) {
    if (!normals.valid[i]) continue;  // invalid pixels store (0, 0, 0)
    const Eigen::Vector3d& n = normals.vectors[i];
    values[i * 3] = static_cast<float>(n.x());
    values[i * 3 + 1] = static_cast<float>(n.y());
    values[i * 3 + 2] = static_cast<float>(n.z());
  }
  write_pfm_payload(path, true, normals.width(), normals.height(), values);
}

}  // namespace nd
