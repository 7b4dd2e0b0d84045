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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "lfv/core/common.hpp"

namespace lfv::core {

inline constexpr int kAngularSize = 9;        // views per angular axis
inline constexpr int kAngularRadius = 4;      // u, v in [-4, 4]
inline constexpr int kNumViews = kAngularSize * kAngularSize;

/// One position on the 9x9 angular grid. (0,0) is the center view.
/// u moves along image x (columns), v along image y (rows).
struct AngularCoord {
  int u = 0;
  int v = 0;

  bool operator==(const AngularCoord&) const = default;
};

inline bool angular_in_range(AngularCoord a) {
  return a.u >= -kAngularRadius && a.u <= kAngularRadius &&
         a.v >= -kAngularRadius && a.v <= kAngularRadius;
}

/// Raster index of an angular coordinate: v-major, u minor.
inline int view_index(AngularCoord a) {
  LFV_CHECK_DOMAIN(angular_in_range(a), "angular coordinate (", a.u, ",", a.v,
                   ") outside the 9x9 grid");
  return (a.v + kAngularRadius) * kAngularSize + (a.u + kAngularRadius);
}

inline AngularCoord view_coord(int index) {
  LFV_CHECK_DOMAIN(index >= 0 && index < kNumViews, "view index ", index, " out of range");
  return {index % kAngularSize - kAngularRadius, index / kAngularSize - kAngularRadius};
}

/// Planar float image, values nominally in [0, 1]. Layout is [c][y][x].
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {
    LFV_CHECK_SHAPE(h > 0 && w > 0 && (c == 1 || c == 2 || c == 3),
                    "bad image shape ", h, "x", w, "x", c);
  }

  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }

  float* plane(int c) { return data.data() + static_cast<size_t>(c) * height * width; }
  const float* plane(int c) const {
    return data.data() + static_cast<size_t>(c) * height * width;
  }

  size_t pixels() const { return static_cast<size_t>(height) * width; }
  size_t size() const { return data.size(); }

  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Per-pixel 2D displacement in pixels. dx moves along x, dy along y.
struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  FlowField() = default;
  FlowField(int h, int w, float fx = 0.0f, float fy = 0.0f)
      : height(h), width(w),
        dx(static_cast<size_t>(h) * w, fx),
        dy(static_cast<size_t>(h) * w, fy) {}

  size_t pixels() const { return static_cast<size_t>(height) * width; }
  bool same_shape(const FlowField& o) const { return height == o.height && width == o.width; }
};

/// Binary mask of flow-consistent pixels.
struct ValidMask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> m;

  ValidMask() = default;
  ValidMask(int h, int w, uint8_t fill = 0)
      : height(h), width(w), m(static_cast<size_t>(h) * w, fill) {}

  size_t pixels() const { return static_cast<size_t>(height) * width; }
  size_t count() const {
    size_t n = 0;
    for (auto v : m) n += v;
    return n;
  }
};

/// One 4D light field at a fixed time: the full 9x9 grid of sub-aperture images.
struct LightFieldFrame {
  int timestamp = 0;
  std::vector<Image> sais;  // kNumViews entries, raster order (v-major)

  LightFieldFrame() : sais(kNumViews) {}
  LightFieldFrame(int h, int w, int c, int t = 0) : timestamp(t) {
    sais.assign(kNumViews, Image(h, w, c));
  }

  Image& sai(AngularCoord a) { return sais[view_index(a)]; }
  const Image& sai(AngularCoord a) const { return sais[view_index(a)]; }
  Image& center() { return sais[view_index({0, 0})]; }
  const Image& center() const { return sais[view_index({0, 0})]; }

  int height() const { return sais[0].height; }
  int width() const { return sais[0].width; }
  int channels() const { return sais[0].channels; }

  void validate() const {
    LFV_CHECK_SHAPE(sais.size() == kNumViews, "light field must have ", kNumViews,
                    " views, got ", sais.size());
    for (const auto& s : sais) {
      LFV_CHECK_SHAPE(s.same_shape(sais[0]),
                      "all sub-aperture images must share one shape");
      LFV_CHECK_SHAPE(!s.data.empty(), "light field has an empty view");
    }
    LFV_CHECK_DOMAIN(timestamp >= 0, "negative frame index");
  }
};

inline Image crop_image(const Image& img, int x0, int y0, int w, int h) {
  LFV_CHECK_DOMAIN(x0 >= 0 && y0 >= 0 && x0 + w <= img.width && y0 + h <= img.height,
                   "crop window out of bounds");
  Image out(h, w, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

inline LightFieldFrame crop_frame(const LightFieldFrame& lf, int x0, int y0, int w,
                                  int h) {
  LightFieldFrame out;
  out.timestamp = lf.timestamp;
  for (int i = 0; i < kNumViews; ++i) out.sais[i] = crop_image(lf.sais[i], x0, y0, w, h);
  return out;
}

/// Exact ground truth attached to a synthetic frame. Flow fields describe the
/// (t-1, t) pair: `flow_to_prev` warps frame t onto frame t-1's grid
/// (sampled as frame_t(p + flow)), `flow_from_prev` the reverse.
struct FrameGroundTruth {
  std::optional<Image> disparity;        // center view, 1 channel, px/view
  std::optional<Image> occlusion;        // center view, 1 channel, {0,1}
  std::optional<FlowField> flow_to_prev;
  std::optional<FlowField> flow_from_prev;
};

/// Time-ordered light field frames plus optional per-frame ground truth.
struct LightFieldVideo {
  std::vector<LightFieldFrame> frames;
  std::vector<FrameGroundTruth> ground_truth;  // empty or frames.size() entries

  void validate() const {
    LFV_CHECK_SHAPE(!frames.empty(), "light field video has no frames");
    for (size_t i = 0; i < frames.size(); ++i) {
      frames[i].validate();
      LFV_CHECK_SHAPE(frames[i].sais[0].same_shape(frames[0].sais[0]),
                      "all frames must share one spatial shape");
      if (i > 0)
        LFV_CHECK_DOMAIN(frames[i].timestamp > frames[i - 1].timestamp,
                         "frame indices must be strictly increasing");
    }
    LFV_CHECK_SHAPE(ground_truth.empty() || ground_truth.size() == frames.size(),
                    "ground truth must cover all frames or none");
  }
};

}  // namespace lfv::core
