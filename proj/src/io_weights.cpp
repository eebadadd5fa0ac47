// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <fstream>

#include "nd/io.hpp"

namespace nd {

namespace {

constexpr char kMagic[4] = {'N', 'D', 'G', 'W'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t value) {
  char bytes[4];
  bytes[0] = static_cast<char>(value & 0xff);
  bytes[1] = static_cast<char>((value >> 8) & 0xff);
  bytes[2] = static_cast<char>((value >> 16) & 0xff);
  bytes[3] = static_cast<char>((value >> 24) & 0xff);
  out.write(bytes, 4);
}

bool read_u32(std::istream& in, uint32_t& value) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
  value = static_cast<uint32_t>(bytes[0]) |
          (static_cast<uint32_t>(bytes[1]) << 8) |
          (static_cast<uint32_t>(bytes[2]) << 16) |
          (static_cast<uint32_t>(bytes[3]) << 24);
  return true;
}

const Tensor& require_tensor(const TensorMap& tensors,
                             const std::string& name) {
  const auto it = tensors.find(name);
  if (it == tensors.end()) {
    throw IoError("weight container is missing tensor '" + name + "'");
  }
  return it->second;
}

}  // namespace

TensorMap read_weight_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path + " is not a weight container (bad magic)");
  }
  uint32_t version = 0;
  if (!read_u32(in, version) || version != kVersion) {
    throw IoError(path + ": unsupported container version");
  }

  TensorMap tensors;
  uint32_t name_len = 0;
  while (read_u32(in, name_len)) {
    if (name_len == 0 || name_len > 4096) {
      throw IoError(path + ": implausible tensor name length");
    }
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw IoError(path + ": truncated tensor name");
    }
    uint32_t rank = 0;
    if (!read_u32(in, rank) || rank > 8) {
      throw IoError(path + ": bad tensor rank");
    }
    Tensor tensor;
    tensor.dims.resize(rank);
    size_t count = 1;
    for (uint32_t& dim : tensor.dims) {
      if (!read_u32(in, dim)) throw IoError(path + ": truncated dims");
      count *= dim;
    }
    if (count > (1u << 28)) {
      throw IoError(path + ": tensor too large");
    }
    tensor.data.resize(count);
    if (count > 0 &&
        !in.read(reinterpret_cast<char*>(tensor.data.data()), count * 4)) {
      throw IoError(path + ": truncated tensor payload");
    }
    tensors[name] = std::move(tensor);
  }
  return tensors;
}

void write_weight_container(const TensorMap& tensors,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  for (const auto& [name, tensor] : tensors) {
    if (tensor.data.size() != tensor.element_count()) {
      throw ShapeError("write_weight_container: tensor '" + name +
                       "' payload does not match its dims");
    }
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(tensor.dims.size()));
    for (uint32_t dim : tensor.dims) write_u32(out, dim);
    out.write(reinterpret_cast<const char*>(tensor.data.data()),
              static_cast<std::streamsize>(tensor.data.size() * 4));
  }
  if (!out) throw IoError("cannot write " + path);
}

ConvGruWeights convgru_weights_from_container(const TensorMap& tensors) {
  auto gate = [&](const std::string& prefix) {
    SeparableConvWeights w;
    w.depthwise = require_tensor(tensors, prefix + ".depthwise");
    w.pointwise = require_tensor(tensors, prefix + ".pointwise");
    w.bias = require_tensor(tensors, prefix + ".bias");
    return w;
  };
  ConvGruWeights w;
  w.update = gate("update");
  w.reset = gate("reset");
  w.candidate = gate("candidate");
  if (w.update.pointwise.dims.size() != 2) {
    throw ShapeError("convgru weights: update.pointwise must be rank 2");
  }
  w.hidden_channels = w.update.out_channels();
  w.input_channels = w.update.in_channels() - w.hidden_channels;
  w.validate();
  return w;
}

DeltaProjection delta_projection_from_container(const TensorMap& tensors,
                                                const std::string& prefix) {
  DeltaProjection proj;
  proj.pointwise = require_tensor(tensors, prefix + ".pointwise");
  proj.bias = require_tensor(tensors, prefix + ".bias");
  return proj;
}

}  // namespace nd
