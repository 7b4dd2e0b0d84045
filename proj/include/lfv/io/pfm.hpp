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

#include <bit>
#include <fstream>
#include <string>
#include <vector>

#include "lfv/core/image.hpp"

namespace lfv::io {

using core::FlowField;
using core::Image;

// Standard PFM: "Pf" = 1 channel, "PF" = 3 channels, rows stored bottom-up,
// pixel-interleaved float32, negative scale = little endian. Flow fields use
// the type token "PF2" for 2 interleaved channels (dx, dy); everything else
// about the layout is unchanged.

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "PFM writer assumes a little-endian host");

inline void write_pfm_data(std::ofstream& f, const std::string& token, int width,
                           int height, int channels, const float* planar) {
  f << token << "\n" << width << " " << height << "\n" << "-1.0" << "\n";
  std::vector<float> row(static_cast<size_t>(width) * channels);
  const size_t plane = static_cast<size_t>(width) * height;
  for (int y = height - 1; y >= 0; --y) {  // bottom-up
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c)
        row[static_cast<size_t>(x) * channels + c] =
            planar[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * width + x];
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

struct PfmHeader {
  std::string token;
  int width = 0, height = 0, channels = 0;
  bool little_endian = true;
};

inline PfmHeader read_pfm_header(std::ifstream& f, const std::string& path) {
  PfmHeader h;
  std::string scale_str;
  f >> h.token >> h.width >> h.height >> scale_str;
  if (!f) throw IoError("bad PFM header in " + path);
  f.get();  // single whitespace after the scale line
  if (h.token == "Pf") h.channels = 1;
  else if (h.token == "PF") h.channels = 3;
  else if (h.token == "PF2") h.channels = 2;
  else throw IoError("unknown PFM type '" + h.token + "' in " + path);
  h.little_endian = std::stod(scale_str) < 0.0;
  if (!h.little_endian) throw IoError("big-endian PFM not supported: " + path);
  if (h.width <= 0 || h.height <= 0) throw IoError("bad PFM extents in " + path);
  return h;
}

inline std::vector<float> read_pfm_planar(std::ifstream& f, const PfmHeader& h,
                                          const std::string& path) {
  const size_t plane = static_cast<size_t>(h.width) * h.height;
  std::vector<float> planar(plane * h.channels);
  std::vector<float> row(static_cast<size_t>(h.width) * h.channels);
  for (int y = h.height - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!f) throw IoError("truncated PFM data in " + path);
    for (int x = 0; x < h.width; ++x)
      for (int c = 0; c < h.channels; ++c)
        planar[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * h.width + x] =
            row[static_cast<size_t>(x) * h.channels + c];
  }
  return planar;
}

}  // namespace detail

inline void write_pfm(const std::string& path, const Image& img) {
  LFV_CHECK_SHAPE(img.channels == 1 || img.channels == 3,
                  "PFM images must have 1 or 3 channels");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  detail::write_pfm_data(f, img.channels == 1 ? "Pf" : "PF", img.width, img.height,
                         img.channels, img.data.data());
  if (!f) throw IoError("failed writing " + path);
}

inline void write_pfm(const std::string& path, const FlowField& flow) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  std::vector<float> planar(flow.pixels() * 2);
  std::copy(flow.dx.begin(), flow.dx.end(), planar.begin());
  std::copy(flow.dy.begin(), flow.dy.end(), planar.begin() + flow.pixels());
  detail::write_pfm_data(f, "PF2", flow.width, flow.height, 2, planar.data());
  if (!f) throw IoError("failed writing " + path);
}

inline Image read_pfm_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  auto h = detail::read_pfm_header(f, path);
  if (h.channels == 2) throw IoError("expected an image PFM, got a flow PFM: " + path);
  Image img(h.height, h.width, h.channels);
  img.data = detail::read_pfm_planar(f, h, path);
  return img;
}

inline FlowField read_pfm_flow(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  auto h = detail::read_pfm_header(f, path);
  if (h.channels != 2) throw IoError("expected a 2-channel flow PFM: " + path);
  auto planar = detail::read_pfm_planar(f, h, path);
  FlowField flow(h.height, h.width);
  std::copy(planar.begin(), planar.begin() + flow.pixels(), flow.dx.begin());
  std::copy(planar.begin() + flow.pixels(), planar.end(), flow.dy.begin());
  return flow;
}

}  // namespace lfv::io
