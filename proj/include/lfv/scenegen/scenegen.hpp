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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfv/core/common.hpp"
#include "lfv/core/image.hpp"

namespace lfv::scenegen {

using core::AngularCoord;
using core::FlowField;
using core::Image;
using core::LightFieldFrame;
using core::LightFieldVideo;

// ---------------------------------------------------------------------------
// Scene description
// ---------------------------------------------------------------------------

struct Silhouette {
  enum class Kind { kFullPlane, kRect, kDisk };
  Kind kind = Kind::kFullPlane;
  // rect: origin + extent; disk: center + radius. Reference-frame pixels.
  float x0 = 0, y0 = 0, w = 0, h = 0;
  float cx = 0, cy = 0, radius = 0;

  bool covers(float qx, float qy) const {
    switch (kind) {
      case Kind::kFullPlane: return true;
      case Kind::kRect: return qx >= x0 && qx < x0 + w && qy >= y0 && qy < y0 + h;
      case Kind::kDisk: {
        float dx = qx - cx, dy = qy - cy;
        return dx * dx + dy * dy <= radius * radius;
      }
    }
    return false;
  }
};

struct Layer {
  float disparity = 0.0f;       // px per angular step; larger = nearer
  uint64_t texture_seed = 0;
  Silhouette silhouette;
  float vel_x = 0.0f, vel_y = 0.0f;  // px per frame
  bool solid = false;                 // constant color instead of noise
  std::array<float, 3> solid_value = {0.5f, 0.5f, 0.5f};
};

/// Declarative description of a layered Lambertian scene observed by a 9x9
/// camera grid. Layers are ordered far to near with strictly increasing
/// disparity; layer 0 is the full-plane background.
struct SceneSpec {
  std::vector<Layer> layers;
  int frame_count = 1;
  int width = 64;
  int height = 64;
  int channels = 1;  // 1 or 3
  float eta_scene = 1.0f;  // suggested shift constant for this scene
  uint64_t seed = 0;

  void validate() const {
    LFV_CHECK_DOMAIN(!layers.empty(), "scene needs at least a background layer");
    LFV_CHECK_DOMAIN(layers[0].silhouette.kind == Silhouette::Kind::kFullPlane,
                     "layer 0 must be the full-plane background");
    for (size_t i = 1; i < layers.size(); ++i) {
      LFV_CHECK_DOMAIN(layers[i].silhouette.kind != Silhouette::Kind::kFullPlane,
                       "only layer 0 may be a full plane");
      LFV_CHECK_DOMAIN(layers[i].disparity > layers[i - 1].disparity,
                       "layer disparities must strictly increase far to near");
    }
    for (const auto& l : layers)
      LFV_CHECK_DOMAIN(std::abs(l.disparity) * core::kAngularRadius < width / 4.0f,
                       "layer disparity ", l.disparity, " too large for width ", width);
    LFV_CHECK_DOMAIN(frame_count >= 1, "frame_count must be positive");
    LFV_CHECK_DOMAIN(channels == 1 || channels == 3, "channels must be 1 or 3");
    LFV_CHECK_DOMAIN(width >= 16 && height >= 16, "scene too small");
  }
};

// ---------------------------------------------------------------------------
// Value-noise textures
// ---------------------------------------------------------------------------

namespace detail {

inline float lattice_value(uint64_t seed, int channel, int octave, int64_t i,
                           int64_t j) {
  uint64_t h = hash_combine(seed, static_cast<uint64_t>(channel) * 0x9E37u +
                                      static_cast<uint64_t>(octave));
  h = hash_combine(h, static_cast<uint64_t>(i) * 0x100000001B3ull ^
                          static_cast<uint64_t>(j));
  return static_cast<float>(h >> 11) * 0x1.0p-53f;
}

// Integer lattice cells keep the rendered images exactly piecewise-bilinear
// on the pixel grid, so bilinear resampling of a rendered view is exact.
inline float noise_octave(uint64_t seed, int channel, int octave, float qx,
                          float qy, int cell) {
  float fx = qx / static_cast<float>(cell);
  float fy = qy / static_cast<float>(cell);
  int64_t ix = static_cast<int64_t>(std::floor(fx));
  int64_t iy = static_cast<int64_t>(std::floor(fy));
  float tx = fx - static_cast<float>(ix);
  float ty = fy - static_cast<float>(iy);
  float v00 = lattice_value(seed, channel, octave, ix, iy);
  float v01 = lattice_value(seed, channel, octave, ix + 1, iy);
  float v10 = lattice_value(seed, channel, octave, ix, iy + 1);
  float v11 = lattice_value(seed, channel, octave, ix + 1, iy + 1);
  float top = v00 + tx * (v01 - v00);
  float bot = v10 + tx * (v11 - v10);
  return top + ty * (bot - top);
}

}  // namespace detail

/// Two-octave value noise in [0, 1], evaluated in layer reference coordinates.
inline float texture_value(const Layer& layer, int channel, float qx, float qy) {
  if (layer.solid) return layer.solid_value[static_cast<size_t>(channel)];
  const float o1 = detail::noise_octave(layer.texture_seed, channel, 0, qx, qy, 8);
  const float o2 = detail::noise_octave(layer.texture_seed, channel, 1, qx, qy, 4);
  return (2.0f / 3.0f) * o1 + (1.0f / 3.0f) * o2;
}

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

/// Total translation of a layer's content in view (u, v) at frame t. Layer
/// content defined at reference point q appears at pixel q + offset.
inline std::pair<float, float> layer_offset(const Layer& l, AngularCoord a, int t) {
  return {l.disparity * a.u + l.vel_x * t, l.disparity * a.v + l.vel_y * t};
}

/// Index of the nearest layer covering pixel (x, y) in view (u, v) at frame t.
inline int visible_layer(const SceneSpec& spec, AngularCoord a, int t, float x,
                         float y) {
  for (int li = static_cast<int>(spec.layers.size()) - 1; li > 0; --li) {
    auto [ox, oy] = layer_offset(spec.layers[li], a, t);
    if (spec.layers[li].silhouette.covers(x - ox, y - oy)) return li;
  }
  return 0;  // background covers everything
}

/// Disparity of the visible surface at every pixel of one view.
inline Image disparity_map(const SceneSpec& spec, int t, AngularCoord a = {0, 0}) {
  Image out(spec.height, spec.width, 1);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x)
      out.at(0, y, x) =
          spec.layers[visible_layer(spec, a, t, static_cast<float>(x),
                                    static_cast<float>(y))]
              .disparity;
  return out;
}

/// Occlusion mask on the center-view pixel grid: 1 where the visible layer
/// at that pixel differs across the angular grid (the band where view
/// mixing happens). layer_index >= 0 restricts to disagreements involving
/// that layer.
inline Image occlusion_mask(const SceneSpec& spec, int t, int layer_index = -1) {
  Image out(spec.height, spec.width, 1);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      const int center_layer =
          visible_layer(spec, {0, 0}, t, static_cast<float>(x), static_cast<float>(y));
      bool occluded = false;
      for (int i = 0; i < core::kNumViews && !occluded; ++i) {
        AngularCoord a = core::view_coord(i);
        if (a.u == 0 && a.v == 0) continue;
        int vis = visible_layer(spec, a, t, static_cast<float>(x),
                                static_cast<float>(y));
        if (vis != center_layer &&
            (layer_index < 0 || vis == layer_index || center_layer == layer_index))
          occluded = true;
      }
      out.at(0, y, x) = occluded ? 1.0f : 0.0f;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline Image render_view(const SceneSpec& spec, AngularCoord a, int t) {
  Image img(spec.height, spec.width, spec.channels);
  std::vector<std::pair<float, float>> offsets(spec.layers.size());
  for (size_t li = 0; li < spec.layers.size(); ++li)
    offsets[li] = layer_offset(spec.layers[li], a, t);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      int li = static_cast<int>(spec.layers.size()) - 1;
      for (; li > 0; --li) {
        if (spec.layers[li].silhouette.covers(x - offsets[li].first,
                                              y - offsets[li].second))
          break;
      }
      const Layer& layer = spec.layers[li];
      for (int c = 0; c < spec.channels; ++c)
        img.at(c, y, x) = texture_value(layer, c, x - offsets[li].first,
                                        y - offsets[li].second);
    }
  }
  return img;
}

/// Ground-truth optical flow of the center view for the pair (t-1, t).
/// to_prev lives on frame t-1's grid: frame_t(p + flow) == frame_{t-1}(p)
/// away from motion occlusions. from_prev is the reverse direction on
/// frame t's grid.
inline FlowField gt_optical_flow(const SceneSpec& spec, int t, bool to_prev) {
  LFV_CHECK_DOMAIN(t >= 1, "optical flow needs a previous frame");
  FlowField flow(spec.height, spec.width);
  const int grid_t = to_prev ? t - 1 : t;
  const float sign = to_prev ? 1.0f : -1.0f;
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      const Layer& l = spec.layers[visible_layer(spec, {0, 0}, grid_t,
                                                 static_cast<float>(x),
                                                 static_cast<float>(y))];
      size_t i = static_cast<size_t>(y) * spec.width + x;
      flow.dx[i] = sign * l.vel_x;
      flow.dy[i] = sign * l.vel_y;
    }
  return flow;
}

/// Residual appearance flow for view (u, v): the flow that, applied after
/// input shifting with constant eta, reproduces the rendered view. With the
/// sampling convention out(p) = src(p + flow(p)) this is
///   flow(p) = (eta - d(p)) * (u, v)
/// where d(p) is the visible-surface disparity at pixel p of the target view.
inline FlowField gt_appearance_flow(const SceneSpec& spec, AngularCoord a, float eta,
                                    int t = 0) {
  spec.validate();
  FlowField flow(spec.height, spec.width);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      const float d = spec.layers[visible_layer(spec, a, t, static_cast<float>(x),
                                                static_cast<float>(y))]
                          .disparity;
      size_t i = static_cast<size_t>(y) * spec.width + x;
      flow.dx[i] = (eta - d) * a.u;
      flow.dy[i] = (eta - d) * a.v;
    }
  return flow;
}

/// Renders the full light field video with exact ground truth attached.
inline LightFieldVideo render_video(const SceneSpec& spec) {
  spec.validate();
  LightFieldVideo video;
  video.frames.reserve(spec.frame_count);
  video.ground_truth.resize(spec.frame_count);
  for (int t = 0; t < spec.frame_count; ++t) {
    LightFieldFrame frame;
    frame.timestamp = t;
    for (int i = 0; i < core::kNumViews; ++i)
      frame.sais[i] = render_view(spec, core::view_coord(i), t);
    video.frames.push_back(std::move(frame));

    auto& gt = video.ground_truth[t];
    gt.disparity = disparity_map(spec, t);
    gt.occlusion = occlusion_mask(spec, t);
    if (t >= 1) {
      gt.flow_to_prev = gt_optical_flow(spec, t, true);
      gt.flow_from_prev = gt_optical_flow(spec, t, false);
    }
  }
  return video;
}

// ---------------------------------------------------------------------------
// Randomized datasets
// ---------------------------------------------------------------------------

struct DatasetTemplate {
  int frames = 6;
  int width = 64;
  int height = 64;
  int channels = 1;
  int layers_min = 2;
  int layers_max = 4;
  float disparity_min = 0.0f;
  float disparity_max = 3.0f;
  float velocity_min = -2.0f;
  float velocity_max = 2.0f;
  float eta_scene = 1.0f;
  bool test_split = false;  // train and test derive disjoint per-scene seeds
};

inline SceneSpec random_scene(const DatasetTemplate& tmpl, uint64_t scene_seed) {
  Rng rng(scene_seed);
  SceneSpec spec;
  spec.seed = scene_seed;
  spec.frame_count = tmpl.frames;
  spec.width = tmpl.width;
  spec.height = tmpl.height;
  spec.channels = tmpl.channels;
  spec.eta_scene = tmpl.eta_scene;

  const int n_layers =
      static_cast<int>(rng.uniform_int(tmpl.layers_min, tmpl.layers_max));
  // Stratified disparities keep the far-to-near ordering strict.
  for (int i = 0; i < n_layers; ++i) {
    Layer l;
    const double band = (i + rng.uniform(0.1, 0.9)) / n_layers;
    l.disparity = static_cast<float>(
        tmpl.disparity_min + (tmpl.disparity_max - tmpl.disparity_min) * band);
    l.texture_seed = rng.next_u64();
    l.vel_x = static_cast<float>(rng.uniform(tmpl.velocity_min, tmpl.velocity_max));
    l.vel_y = static_cast<float>(rng.uniform(tmpl.velocity_min, tmpl.velocity_max));
    if (i == 0) {
      l.silhouette.kind = Silhouette::Kind::kFullPlane;
      l.vel_x *= 0.25f;  // slow background keeps most content in frame
      l.vel_y *= 0.25f;
    } else if (rng.next_u64() & 1) {
      l.silhouette.kind = Silhouette::Kind::kRect;
      l.silhouette.w = static_cast<float>(rng.uniform(0.2, 0.5)) * tmpl.width;
      l.silhouette.h = static_cast<float>(rng.uniform(0.2, 0.5)) * tmpl.height;
      l.silhouette.x0 = static_cast<float>(rng.uniform(0.1, 0.9)) * tmpl.width -
                        l.silhouette.w / 2;
      l.silhouette.y0 = static_cast<float>(rng.uniform(0.1, 0.9)) * tmpl.height -
                        l.silhouette.h / 2;
    } else {
      l.silhouette.kind = Silhouette::Kind::kDisk;
      l.silhouette.radius = static_cast<float>(rng.uniform(0.1, 0.25)) * tmpl.width;
      l.silhouette.cx = static_cast<float>(rng.uniform(0.15, 0.85)) * tmpl.width;
      l.silhouette.cy = static_cast<float>(rng.uniform(0.15, 0.85)) * tmpl.height;
    }
    spec.layers.push_back(l);
  }
  spec.validate();
  return spec;
}

inline uint64_t scene_seed_for(uint64_t base_seed, bool test_split, int index) {
  // Train and test splits hash through disjoint streams by construction.
  return hash_combine(base_seed * 2 + (test_split ? 1 : 0),
                      static_cast<uint64_t>(index));
}

inline std::vector<SceneSpec> make_scene_specs(int n_scenes,
                                               const DatasetTemplate& tmpl,
                                               uint64_t seed) {
  LFV_CHECK_DOMAIN(n_scenes >= 1, "make_dataset needs at least one scene");
  std::vector<SceneSpec> specs;
  specs.reserve(n_scenes);
  for (int i = 0; i < n_scenes; ++i)
    specs.push_back(random_scene(tmpl, scene_seed_for(seed, tmpl.test_split, i)));
  return specs;
}

inline std::vector<LightFieldVideo> make_dataset(int n_scenes,
                                                 const DatasetTemplate& tmpl,
                                                 uint64_t seed) {
  std::vector<LightFieldVideo> videos;
  for (const auto& spec : make_scene_specs(n_scenes, tmpl, seed))
    videos.push_back(render_video(spec));
  return videos;
}

// ---------------------------------------------------------------------------
// JSON serialization (scene.json)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const SceneSpec& spec) {
  nlohmann::json j;
  j["frame_count"] = spec.frame_count;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["channels"] = spec.channels;
  j["eta_scene"] = spec.eta_scene;
  j["seed"] = spec.seed;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : spec.layers) {
    nlohmann::json lj;
    lj["disparity"] = l.disparity;
    lj["texture_seed"] = l.texture_seed;
    lj["velocity"] = {l.vel_x, l.vel_y};
    lj["solid"] = l.solid;
    if (l.solid) lj["solid_value"] = l.solid_value;
    switch (l.silhouette.kind) {
      case Silhouette::Kind::kFullPlane:
        lj["silhouette"] = {{"kind", "full"}};
        break;
      case Silhouette::Kind::kRect:
        lj["silhouette"] = {{"kind", "rect"},
                            {"x0", l.silhouette.x0},
                            {"y0", l.silhouette.y0},
                            {"w", l.silhouette.w},
                            {"h", l.silhouette.h}};
        break;
      case Silhouette::Kind::kDisk:
        lj["silhouette"] = {{"kind", "disk"},
                            {"cx", l.silhouette.cx},
                            {"cy", l.silhouette.cy},
                            {"radius", l.silhouette.radius}};
        break;
    }
    j["layers"].push_back(lj);
  }
  return j;
}

inline SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec spec;
  spec.frame_count = j.at("frame_count").get<int>();
  spec.width = j.at("width").get<int>();
  spec.height = j.at("height").get<int>();
  spec.channels = j.at("channels").get<int>();
  spec.eta_scene = j.value("eta_scene", 1.0f);
  spec.seed = j.value("seed", 0ull);
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.disparity = lj.at("disparity").get<float>();
    l.texture_seed = lj.at("texture_seed").get<uint64_t>();
    auto vel = lj.at("velocity");
    l.vel_x = vel[0].get<float>();
    l.vel_y = vel[1].get<float>();
    l.solid = lj.value("solid", false);
    if (l.solid && lj.contains("solid_value"))
      l.solid_value = lj.at("solid_value").get<std::array<float, 3>>();
    const auto& sj = lj.at("silhouette");
    const std::string kind = sj.at("kind").get<std::string>();
    if (kind == "full") {
      l.silhouette.kind = Silhouette::Kind::kFullPlane;
    } else if (kind == "rect") {
      l.silhouette.kind = Silhouette::Kind::kRect;
      l.silhouette.x0 = sj.at("x0").get<float>();
      l.silhouette.y0 = sj.at("y0").get<float>();
      l.silhouette.w = sj.at("w").get<float>();
      l.silhouette.h = sj.at("h").get<float>();
    } else if (kind == "disk") {
      l.silhouette.kind = Silhouette::Kind::kDisk;
      l.silhouette.cx = sj.at("cx").get<float>();
      l.silhouette.cy = sj.at("cy").get<float>();
      l.silhouette.radius = sj.at("radius").get<float>();
    } else {
      throw IoError("unknown silhouette kind: " + kind);
    }
    spec.layers.push_back(l);
  }
  spec.validate();
  return spec;
}

}  // namespace lfv::scenegen
