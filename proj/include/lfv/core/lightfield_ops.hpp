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

#include <algorithm>
#include <cmath>
#include <vector>

#include "lfv/core/image.hpp"
#include "lfv/core/sampling.hpp"

namespace lfv::core {

/// Rec.601 luma weights.
inline constexpr float kLumaR = 0.299f;
inline constexpr float kLumaG = 0.587f;
inline constexpr float kLumaB = 0.114f;

inline Image to_luminance(const Image& img) {
  if (img.channels == 1) return img;
  LFV_CHECK_SHAPE(img.channels == 3, "to_luminance expects 1 or 3 channels, got ",
                  img.channels);
  Image out(img.height, img.width, 1);
  const float* r = img.plane(0);
  const float* g = img.plane(1);
  const float* b = img.plane(2);
  float* y = out.plane(0);
  for (size_t i = 0; i < img.pixels(); ++i)
    y[i] = kLumaR * r[i] + kLumaG * g[i] + kLumaB * b[i];
  return out;
}

inline LightFieldFrame to_luminance(const LightFieldFrame& lf) {
  LightFieldFrame out;
  out.timestamp = lf.timestamp;
  for (int i = 0; i < kNumViews; ++i) out.sais[i] = to_luminance(lf.sais[i]);
  return out;
}

/// Per-pixel arithmetic mean over all 81 sub-aperture images.
inline Image mean_image(const LightFieldFrame& lf) {
  lf.validate();
  Image out(lf.height(), lf.width(), lf.channels());
  std::vector<double> acc(out.size(), 0.0);
  for (const auto& s : lf.sais)
    for (size_t i = 0; i < s.size(); ++i) acc[i] += s.data[i];
  for (size_t i = 0; i < out.size(); ++i)
    out.data[i] = static_cast<float>(acc[i] / kNumViews);
  return out;
}

/// Per-pixel population variance (divide by 81) over sub-aperture images.
inline Image variance_image(const LightFieldFrame& lf) {
  lf.validate();
  Image out(lf.height(), lf.width(), lf.channels());
  std::vector<double> sum(out.size(), 0.0), sumsq(out.size(), 0.0);
  for (const auto& s : lf.sais)
    for (size_t i = 0; i < s.size(); ++i) {
      sum[i] += s.data[i];
      sumsq[i] += static_cast<double>(s.data[i]) * s.data[i];
    }
  for (size_t i = 0; i < out.size(); ++i) {
    double mean = sum[i] / kNumViews;
    double var = sumsq[i] / kNumViews - mean * mean;
    out.data[i] = static_cast<float>(std::max(var, 0.0));
  }
  return out;
}

/// How the variance image is binarized into the per-view mask grid. The view
/// shift follows the same rule as input shifting: the variance image is moved
/// by eta * (u, v) before thresholding at that view.
struct VarianceMaskPolicy {
  enum class Mode { kPercentile, kAbsolute };
  Mode mode = Mode::kPercentile;
  float percentile = 90.0f;  // used in kPercentile mode
  float threshold = 0.0f;    // used in kAbsolute mode
  float eta = 1.0f;          // px/view shift of the variance image
};

/// Threshold value selected by the policy (nearest-rank percentile).
inline float variance_mask_threshold(const Image& var, const VarianceMaskPolicy& policy) {
  if (policy.mode == VarianceMaskPolicy::Mode::kAbsolute) return policy.threshold;
  std::vector<float> sorted(var.data);
  std::sort(sorted.begin(), sorted.end());
  double rank = std::clamp(policy.percentile, 0.0f, 100.0f) / 100.0 *
                static_cast<double>(sorted.size() - 1);
  return sorted[static_cast<size_t>(rank)];
}

/// 9x9 grid of binary masks: 1 where the view-shifted variance exceeds the
/// policy threshold.
inline std::vector<Image> variance_mask(const Image& var, const VarianceMaskPolicy& policy) {
  LFV_CHECK_SHAPE(var.channels == 1, "variance mask expects a single-channel image");
  for (float v : var.data)
    LFV_CHECK_DOMAIN(v >= 0.0f, "variance image must be non-negative");

  const float thr = variance_mask_threshold(var, policy);
  std::vector<Image> masks(kNumViews);
  Image shifted(var.height, var.width, 1);
  for (int i = 0; i < kNumViews; ++i) {
    AngularCoord a = view_coord(i);
    shift_plane(var.plane(0), shifted.plane(0), var.height, var.width,
                policy.eta * a.u, policy.eta * a.v);
    Image mask(var.height, var.width, 1);
    for (size_t p = 0; p < mask.size(); ++p)
      mask.data[p] = shifted.data[p] > thr ? 1.0f : 0.0f;
    masks[i] = std::move(mask);
  }
  return masks;
}

/// Where an EPI is sliced: fix an image row y and angular v (sweep u along x),
/// or fix an image column x and angular u (sweep v along y).
struct EpiSlice {
  enum class Axis { kRow, kColumn };
  Axis axis = Axis::kRow;
  int fixed_spatial = 0;  // y for kRow, x for kColumn
  int fixed_angular = 0;  // v for kRow, u for kColumn
};

/// 2D epipolar-plane slice, one row per view along the swept angular axis.
/// Shape is (9 x width) for row slices, (9 x height) for column slices.
inline Image extract_epi(const LightFieldFrame& lf, const EpiSlice& slice) {
  lf.validate();
  const int c = lf.channels();
  LFV_CHECK_DOMAIN(slice.fixed_angular >= -kAngularRadius &&
                       slice.fixed_angular <= kAngularRadius,
                   "EPI angular index out of range");
  if (slice.axis == EpiSlice::Axis::kRow) {
    LFV_CHECK_DOMAIN(slice.fixed_spatial >= 0 && slice.fixed_spatial < lf.height(),
                     "EPI row out of range");
    Image epi(kAngularSize, lf.width(), c);
    for (int u = -kAngularRadius; u <= kAngularRadius; ++u) {
      const Image& s = lf.sai({u, slice.fixed_angular});
      for (int ch = 0; ch < c; ++ch)
        for (int x = 0; x < lf.width(); ++x)
          epi.at(ch, u + kAngularRadius, x) = s.at(ch, slice.fixed_spatial, x);
    }
    return epi;
  }
  LFV_CHECK_DOMAIN(slice.fixed_spatial >= 0 && slice.fixed_spatial < lf.width(),
                   "EPI column out of range");
  Image epi(kAngularSize, lf.height(), c);
  for (int v = -kAngularRadius; v <= kAngularRadius; ++v) {
    const Image& s = lf.sai({slice.fixed_angular, v});
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < lf.height(); ++y)
        epi.at(ch, v + kAngularRadius, y) = s.at(ch, y, slice.fixed_spatial);
  }
  return epi;
}

/// Synthetic refocus at disparity d: every view is sampled at p + d*(u, v)
/// (moving its content toward the center view) and averaged. d = 0 gives
/// exactly the mean image.
inline Image refocus(const LightFieldFrame& lf, float d) {
  lf.validate();
  if (d == 0.0f) return mean_image(lf);
  LFV_CHECK_DOMAIN(std::abs(d) * kAngularRadius <
                       std::min(lf.height(), lf.width()),
                   "refocus disparity ", d, " exceeds the image extent");
  Image out(lf.height(), lf.width(), lf.channels());
  std::vector<double> acc(out.size(), 0.0);
  const int h = lf.height(), w = lf.width();
  for (int i = 0; i < kNumViews; ++i) {
    AngularCoord a = view_coord(i);
    const Image& s = lf.sais[i];
    for (int c = 0; c < lf.channels(); ++c) {
      const float* plane = s.plane(c);
      double* accp = acc.data() + static_cast<size_t>(c) * h * w;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          accp[y * w + x] += bilinear_sample_plane(plane, h, w, x + d * a.u, y + d * a.v);
    }
  }
  for (size_t i = 0; i < out.size(); ++i)
    out.data[i] = static_cast<float>(acc[i] / kNumViews);
  return out;
}

}  // namespace lfv::core
