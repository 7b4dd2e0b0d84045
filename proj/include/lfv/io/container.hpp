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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "lfv/core/image.hpp"
#include "lfv/io/pfm.hpp"
#include "lfv/io/png_io.hpp"

namespace lfv::io {

namespace fs = std::filesystem;
using core::LightFieldFrame;
using core::LightFieldVideo;

// On-disk light field container: a directory with meta.json and one
// subdirectory per frame holding the 81 sub-aperture images as
// sai_u{u}_v{v}.png (8-bit) or .pfm (float32), plus ground-truth
// disparity/occlusion/flow as .pfm when available.

struct ContainerMeta {
  int width = 0;
  int height = 0;
  int channels = 0;
  int angular_rows = core::kAngularSize;
  int angular_cols = core::kAngularSize;
  int frame_count = 0;
  std::string pixel_format = "pfm";  // "pfm" or "png"
  std::optional<float> eta;
  bool gt_disparity = false;
  bool gt_occlusion = false;
  bool gt_flow = false;
};

inline std::string frame_dir_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", t);
  return buf;
}

inline std::string sai_file_name(core::AngularCoord a, const std::string& ext) {
  return "sai_u" + std::to_string(a.u) + "_v" + std::to_string(a.v) + "." + ext;
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
  if (!f) throw IoError("failed writing " + path.string());
}

inline nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  f >> j;
  return j;
}

inline void write_container(const fs::path& dir, const LightFieldVideo& video,
                            const std::string& pixel_format = "pfm",
                            std::optional<float> eta = std::nullopt) {
  video.validate();
  LFV_CHECK_USAGE(pixel_format == "pfm" || pixel_format == "png",
                  "pixel_format must be 'pfm' or 'png'");
  fs::create_directories(dir);

  const bool has_gt = !video.ground_truth.empty();
  nlohmann::json meta;
  meta["format"] = "lfv-container-v1";
  meta["width"] = video.frames[0].width();
  meta["height"] = video.frames[0].height();
  meta["channels"] = video.frames[0].channels();
  meta["angular"] = {core::kAngularSize, core::kAngularSize};
  meta["frame_count"] = video.frames.size();
  meta["value_range"] = {0.0, 1.0};
  meta["pixel_format"] = pixel_format;
  if (eta) meta["eta"] = *eta;
  if (has_gt) {
    meta["ground_truth"] = {
        {"disparity", video.ground_truth[0].disparity.has_value()},
        {"occlusion", video.ground_truth[0].occlusion.has_value()},
        {"flow", video.ground_truth.size() > 1 &&
                     video.ground_truth[1].flow_to_prev.has_value()}};
  }
  write_json_file(dir / "meta.json", meta);

  for (size_t t = 0; t < video.frames.size(); ++t) {
    const fs::path fdir = dir / frame_dir_name(static_cast<int>(t));
    fs::create_directories(fdir);
    for (int i = 0; i < core::kNumViews; ++i) {
      core::AngularCoord a = core::view_coord(i);
      const fs::path p = fdir / sai_file_name(a, pixel_format);
      if (pixel_format == "pfm")
        write_pfm(p.string(), video.frames[t].sais[i]);
      else
        write_png(p.string(), video.frames[t].sais[i]);
    }
    if (has_gt) {
      const auto& gt = video.ground_truth[t];
      if (gt.disparity) write_pfm((fdir / "disparity.pfm").string(), *gt.disparity);
      if (gt.occlusion) write_pfm((fdir / "occlusion.pfm").string(), *gt.occlusion);
      if (gt.flow_to_prev)
        write_pfm((fdir / "flow_to_prev.pfm").string(), *gt.flow_to_prev);
      if (gt.flow_from_prev)
        write_pfm((fdir / "flow_from_prev.pfm").string(), *gt.flow_from_prev);
    }
  }
}

inline ContainerMeta read_container_meta(const fs::path& dir) {
  nlohmann::json j = read_json_file(dir / "meta.json");
  ContainerMeta m;
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.channels = j.at("channels").get<int>();
  auto ang = j.at("angular");
  m.angular_rows = ang[0].get<int>();
  m.angular_cols = ang[1].get<int>();
  m.frame_count = j.at("frame_count").get<int>();
  m.pixel_format = j.at("pixel_format").get<std::string>();
  if (j.contains("eta")) m.eta = j["eta"].get<float>();
  if (j.contains("ground_truth")) {
    m.gt_disparity = j["ground_truth"].value("disparity", false);
    m.gt_occlusion = j["ground_truth"].value("occlusion", false);
    m.gt_flow = j["ground_truth"].value("flow", false);
  }
  return m;
}

inline LightFieldVideo read_container(const fs::path& dir) {
  const ContainerMeta m = read_container_meta(dir);
  LFV_CHECK_SHAPE(m.angular_rows == core::kAngularSize &&
                      m.angular_cols == core::kAngularSize,
                  "container ", dir.string(), " is not a 9x9 light field");
  LightFieldVideo video;
  video.frames.resize(m.frame_count);
  video.ground_truth.resize(m.frame_count);
  for (int t = 0; t < m.frame_count; ++t) {
    const fs::path fdir = dir / frame_dir_name(t);
    auto& frame = video.frames[t];
    frame.timestamp = t;
    for (int i = 0; i < core::kNumViews; ++i) {
      core::AngularCoord a = core::view_coord(i);
      const fs::path p = fdir / sai_file_name(a, m.pixel_format);
      frame.sais[i] = m.pixel_format == "pfm" ? read_pfm_image(p.string())
                                              : read_png(p.string());
    }
    auto& gt = video.ground_truth[t];
    if (m.gt_disparity && fs::exists(fdir / "disparity.pfm"))
      gt.disparity = read_pfm_image((fdir / "disparity.pfm").string());
    if (m.gt_occlusion && fs::exists(fdir / "occlusion.pfm"))
      gt.occlusion = read_pfm_image((fdir / "occlusion.pfm").string());
    if (m.gt_flow && fs::exists(fdir / "flow_to_prev.pfm")) {
      gt.flow_to_prev = read_pfm_flow((fdir / "flow_to_prev.pfm").string());
      gt.flow_from_prev = read_pfm_flow((fdir / "flow_from_prev.pfm").string());
    }
  }
  video.validate();
  return video;
}

/// Center-view sequence of any container (used as the monocular input; works
/// for 1x1 monocular containers as well as full light fields).
inline std::vector<core::Image> read_center_video(const fs::path& dir) {
  const ContainerMeta m = read_container_meta(dir);
  std::vector<core::Image> frames;
  frames.reserve(m.frame_count);
  for (int t = 0; t < m.frame_count; ++t) {
    const fs::path p =
        dir / frame_dir_name(t) / sai_file_name({0, 0}, m.pixel_format);
    frames.push_back(m.pixel_format == "pfm" ? read_pfm_image(p.string())
                                             : read_png(p.string()));
  }
  return frames;
}

/// Lists scene container directories under a dataset root (any directory
/// holding a meta.json), sorted by name for determinism.
inline std::vector<fs::path> list_scene_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (fs::exists(root / "meta.json")) {
    dirs.push_back(root);
    return dirs;
  }
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "meta.json"))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  LFV_CHECK_DOMAIN(!dirs.empty(), "no light field containers under ", root.string());
  return dirs;
}

}  // namespace lfv::io
