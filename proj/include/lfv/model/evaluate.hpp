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

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lfv/core/image.hpp"
#include "lfv/core/lightfield_ops.hpp"
#include "lfv/core/metrics.hpp"
#include "lfv/warp/warp.hpp"

namespace lfv::model {

struct FrameMetrics {
  int frame = 0;
  double psnr = 0.0;   // mean over all 81 views
  double ssim = 0.0;   // mean over all 81 views, on luminance
  std::optional<double> e_temp;  // needs ground-truth flow and a previous frame
};

struct VideoMetrics {
  std::vector<FrameMetrics> frames;
  double avg_psnr = 0.0;
  double avg_ssim = 0.0;
  std::optional<double> avg_e_temp;
};

/// Per-frame and average PSNR/SSIM over all views, plus the temporal warping
/// error when the ground-truth container carries flow fields.
inline VideoMetrics evaluate_video(const core::LightFieldVideo& pred,
                                   const core::LightFieldVideo& gt,
                                   float valid_mask_tol = 1.0f) {
  pred.validate();
  gt.validate();
  LFV_CHECK_SHAPE(pred.frames.size() == gt.frames.size(),
                  "evaluate: frame counts differ");
  VideoMetrics vm;
  double psnr_acc = 0.0, ssim_acc = 0.0, temp_acc = 0.0;
  int temp_n = 0;
  for (size_t t = 0; t < pred.frames.size(); ++t) {
    const auto& pf = pred.frames[t];
    const auto& gf = gt.frames[t];
    LFV_CHECK_SHAPE(pf.sais[0].same_shape(gf.sais[0]), "evaluate: frame shapes differ");
    FrameMetrics fm;
    fm.frame = static_cast<int>(t);
    double p = 0.0, s = 0.0;
    for (int i = 0; i < core::kNumViews; ++i) {
      p += core::psnr(pf.sais[i], gf.sais[i]);
      s += core::ssim(core::to_luminance(pf.sais[i]), core::to_luminance(gf.sais[i]));
    }
    fm.psnr = p / core::kNumViews;
    fm.ssim = s / core::kNumViews;

    if (t >= 1 && t < gt.ground_truth.size() && gt.ground_truth[t].flow_to_prev &&
        gt.ground_truth[t].flow_from_prev) {
      const auto& fw = *gt.ground_truth[t].flow_to_prev;
      const auto& bw = *gt.ground_truth[t].flow_from_prev;
      core::ValidMask mask = warp::valid_mask(fw, bw, valid_mask_tol);
      if (mask.count() > 0) {
        fm.e_temp = warp::temporal_error(pf, pred.frames[t - 1], fw, mask);
        temp_acc += *fm.e_temp;
        ++temp_n;
      }
    }
    psnr_acc += fm.psnr;
    ssim_acc += fm.ssim;
    vm.frames.push_back(fm);
  }
  vm.avg_psnr = psnr_acc / static_cast<double>(pred.frames.size());
  vm.avg_ssim = ssim_acc / static_cast<double>(pred.frames.size());
  if (temp_n > 0) vm.avg_e_temp = temp_acc / temp_n;
  return vm;
}

/// The frame-by-frame baseline: every view replicates the center view.
inline core::LightFieldVideo replicate_center_baseline(const core::LightFieldVideo& gt) {
  core::LightFieldVideo out;
  out.frames.reserve(gt.frames.size());
  for (const auto& f : gt.frames) {
    core::LightFieldFrame r;
    r.timestamp = f.timestamp;
    for (int i = 0; i < core::kNumViews; ++i) r.sais[i] = f.center();
    out.frames.push_back(std::move(r));
  }
  return out;
}

/// PSNR over non-center views only (the replicate baseline is exact on the
/// center view, so the comparison that matters excludes it).
inline double mean_noncenter_psnr(const core::LightFieldVideo& pred,
                                  const core::LightFieldVideo& gt) {
  double acc = 0.0;
  int n = 0;
  for (size_t t = 0; t < pred.frames.size(); ++t)
    for (int i = 0; i < core::kNumViews; ++i) {
      if (i == core::view_index({0, 0})) continue;
      acc += core::psnr(pred.frames[t].sais[i], gt.frames[t].sais[i]);
      ++n;
    }
  return acc / n;
}

inline std::string format_metrics_csv(const VideoMetrics& vm) {
  std::ostringstream os;
  os << "frame,psnr,ssim,e_temp\n";
  for (const auto& f : vm.frames) {
    os << f.frame << "," << f.psnr << "," << f.ssim << ",";
    if (f.e_temp) os << *f.e_temp;
    os << "\n";
  }
  return os.str();
}

/// Summary in the two-table report layout: image quality, then temporal
/// stability.
inline std::string format_metrics_summary(const VideoMetrics& vm,
                                          const std::string& dataset_name) {
  std::ostringstream os;
  os << "Average PSNR (in dB) and SSIM\n";
  os << "Dataset        PSNR      SSIM\n";
  os << dataset_name << "    " << vm.avg_psnr << "    " << vm.avg_ssim << "\n\n";
  os << "Temporal stability (warping error E_temp)\n";
  os << "Dataset        E_temp\n";
  os << dataset_name << "    ";
  if (vm.avg_e_temp)
    os << *vm.avg_e_temp;
  else
    os << "n/a (no ground-truth flow)";
  os << "\n";
  return os.str();
}

}  // namespace lfv::model
