/**
 * Copyright (c) 2026 the lfv authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfv/nn/layers.hpp"

namespace lfv::nn {

// Checkpoint file layout: 8-byte magic, little-endian u64 JSON index length,
// the JSON index, then the flat float32 payload. Index offsets are relative
// to the payload start.
inline constexpr char kCheckpointMagic[9] = "LFVCKPT1";

template <class T>
inline void save_checkpoint(const std::string& path, const ParamRegistry<T>& registry,
                            const nlohmann::json& extra = {}) {
  nlohmann::json index;
  index["version"] = kToolVersion;
  if (!extra.is_null() && !extra.empty()) index["meta"] = extra;
  nlohmann::json tensors = nlohmann::json::object();
  uint64_t offset = 0;
  for (size_t i = 0; i < registry.size(); ++i) {
    const auto& p = registry.params()[i];
    nlohmann::json t;
    t["offset"] = offset;
    t["shape"] = p.shape();
    t["dtype"] = "f32";
    tensors[registry.names()[i]] = t;
    offset += static_cast<uint64_t>(p.numel()) * sizeof(float);
  }
  index["tensors"] = tensors;
  const std::string js = index.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  f.write(kCheckpointMagic, 8);
  uint64_t len = js.size();
  unsigned char lenb[8];
  for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>(len >> (8 * i));
  f.write(reinterpret_cast<const char*>(lenb), 8);
  f.write(js.data(), static_cast<std::streamsize>(js.size()));
  for (size_t i = 0; i < registry.size(); ++i) {
    const auto& v = registry.params()[i].values();
    std::vector<float> buf(v.size());
    for (size_t j = 0; j < v.size(); ++j) buf[j] = static_cast<float>(v[j]);
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!f) throw IoError("failed writing checkpoint: " + path);
}

/// Loads values into an already-built registry; every registered parameter
/// must be present with a matching shape.
template <class T>
inline nlohmann::json load_checkpoint(const std::string& path,
                                      ParamRegistry<T>& registry) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw IoError("not a checkpoint file: " + path);
  unsigned char lenb[8];
  f.read(reinterpret_cast<char*>(lenb), 8);
  uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= static_cast<uint64_t>(lenb[i]) << (8 * i);
  std::string js(len, '\0');
  f.read(js.data(), static_cast<std::streamsize>(len));
  if (!f) throw IoError("truncated checkpoint index: " + path);
  nlohmann::json index = nlohmann::json::parse(js);

  const std::streampos payload_start = f.tellg();
  const auto& tensors = index.at("tensors");
  for (size_t i = 0; i < registry.size(); ++i) {
    const std::string& name = registry.names()[i];
    if (!tensors.contains(name))
      throw IoError("checkpoint is missing parameter '" + name + "'");
    const auto& entry = tensors.at(name);
    Shape shape = entry.at("shape").get<Shape>();
    auto& p = registry.params()[i];
    LFV_CHECK_SHAPE(shape == p.shape(), "checkpoint shape mismatch for '", name,
                    "': file has ", shape_str(shape), ", model has ",
                    shape_str(p.shape()));
    uint64_t offset = entry.at("offset").get<uint64_t>();
    f.seekg(payload_start + static_cast<std::streamoff>(offset));
    std::vector<float> buf(static_cast<size_t>(p.numel()));
    f.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!f) throw IoError("truncated checkpoint payload: " + path);
    auto& v = p.values();
    for (size_t j = 0; j < v.size(); ++j) v[j] = static_cast<T>(buf[j]);
  }
  return index.contains("meta") ? index["meta"] : nlohmann::json{};
}

}  // namespace lfv::nn
