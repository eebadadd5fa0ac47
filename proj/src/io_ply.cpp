// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>

#include "nd/io.hpp"

namespace nd {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void export_ply(const PointCloud& cloud, const std::string& path) {
  const bool has_normals = !cloud.normals.empty();
  const bool has_colors = !cloud.colors.empty();
  if (has_normals && cloud.normals.size() != cloud.points.size()) {
    throw ShapeError("export_ply: normals count differs from points");
  }
  if (has_colors && cloud.colors.size() != cloud.points.size()) {
    throw ShapeError("export_ply: colors count differs from points");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (has_normals) {
    out << "property float nx\nproperty float ny\nproperty float nz\n";
  }
  if (has_colors) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "end_header\n";

  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z());
    if (has_normals) {
      const auto& n = cloud.normals[i];
      out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
          << format_double(n.z());
    }
    if (has_colors) {
      const auto& c = cloud.colors[i];
      out << ' ' << static_cast<int>(c[0]) << ' ' << static_cast<int>(c[1])
          << ' ' << static_cast<int>(c[2]);
    }
    out << '\n';
  }
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace nd
