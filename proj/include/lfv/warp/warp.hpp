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

namespace lfv::warp {

using core::AngularCoord;
using core::FlowField;
using core::Image;
using core::LightFieldFrame;
using core::ValidMask;

// ---------------------------------------------------------------------------
// Scalar kernels. Templated so gradient checks can run the same code in
// double precision.
// ---------------------------------------------------------------------------

/// out(p) = src(p + flow(p)), bilinear, edge-clamped. One plane.
template <class T>
inline void warp_plane(const T* src, const T* fdx, const T* fdy, T* out,
                       int height, int width) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      size_t i = static_cast<size_t>(y) * width + x;
      out[i] = core::bilinear_sample_plane(src, height, width,
                                           static_cast<T>(x) + fdx[i],
                                           static_cast<T>(y) + fdy[i]);
    }
}

/// Analytic gradients of warp_plane. Accumulates (does not zero) into
/// grad_src, grad_fdx, grad_fdy; any of them may be null.
template <class T>
inline void warp_plane_backward(const T* src, const T* fdx, const T* fdy,
                                const T* upstream, T* grad_src, T* grad_fdx,
                                T* grad_fdy, int height, int width) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      size_t i = static_cast<size_t>(y) * width + x;
      const T g = upstream[i];
      if (g == T(0)) continue;
      T sx_raw = static_cast<T>(x) + fdx[i];
      T sy_raw = static_cast<T>(y) + fdy[i];
      T sx = std::clamp(sx_raw, T(0), T(width - 1));
      T sy = std::clamp(sy_raw, T(0), T(height - 1));
      int x0 = static_cast<int>(std::floor(sx));
      int y0 = static_cast<int>(std::floor(sy));
      int x1 = std::min(x0 + 1, width - 1);
      int y1 = std::min(y0 + 1, height - 1);
      T fx = sx - static_cast<T>(x0);
      T fy = sy - static_cast<T>(y0);
      const T v00 = src[y0 * width + x0];
      const T v01 = src[y0 * width + x1];
      const T v10 = src[y1 * width + x0];
      const T v11 = src[y1 * width + x1];
      if (grad_src) {
        grad_src[y0 * width + x0] += g * (T(1) - fx) * (T(1) - fy);
        grad_src[y0 * width + x1] += g * fx * (T(1) - fy);
        grad_src[y1 * width + x0] += g * (T(1) - fx) * fy;
        grad_src[y1 * width + x1] += g * fx * fy;
      }
      // Clamped samples have zero derivative w.r.t. the flow.
      if (grad_fdx && sx_raw >= T(0) && sx_raw <= T(width - 1)) {
        T dvdx = (T(1) - fy) * (v01 - v00) + fy * (v11 - v10);
        grad_fdx[i] += g * dvdx;
      }
      if (grad_fdy && sy_raw >= T(0) && sy_raw <= T(height - 1)) {
        T dvdy = (T(1) - fx) * (v10 - v00) + fx * (v11 - v01);
        grad_fdy[i] += g * dvdy;
      }
    }
}

// ---------------------------------------------------------------------------
// Image-level operations.
// ---------------------------------------------------------------------------

/// Input shifting: translate the center view toward angular position (u, v)
/// by eta pixels per view, edge-clamped.
inline Image shift_input(const Image& center, AngularCoord a, float eta) {
  LFV_CHECK_DOMAIN(core::angular_in_range(a), "angular coordinate out of range");
  LFV_CHECK_DOMAIN(std::abs(eta) * core::kAngularRadius <
                       std::min(center.height, center.width) / 2.0f,
                   "shift constant ", eta, " too large for ", center.height, "x",
                   center.width, " images");
  if (a.u == 0 && a.v == 0) return center;
  Image out(center.height, center.width, center.channels);
  for (int c = 0; c < center.channels; ++c)
    core::shift_plane(center.plane(c), out.plane(c), center.height, center.width,
                      eta * a.u, eta * a.v);
  return out;
}

/// Backward-warp src by a per-pixel flow: out(p) = src(p + flow(p)).
inline Image bilinear_warp(const Image& src, const FlowField& flow) {
  LFV_CHECK_SHAPE(src.height == flow.height && src.width == flow.width,
                  "bilinear_warp: image and flow shapes differ");
  Image out(src.height, src.width, src.channels);
  for (int c = 0; c < src.channels; ++c)
    warp_plane(src.plane(c), flow.dx.data(), flow.dy.data(), out.plane(c),
               src.height, src.width);
  return out;
}

struct WarpGradients {
  Image grad_src;      // same shape as src
  FlowField grad_flow; // same shape as flow
};

/// Analytic gradients of bilinear_warp w.r.t. source image and flow.
inline WarpGradients bilinear_warp_backward(const Image& src, const FlowField& flow,
                                            const Image& upstream) {
  LFV_CHECK_SHAPE(src.height == flow.height && src.width == flow.width,
                  "bilinear_warp_backward: image and flow shapes differ");
  LFV_CHECK_SHAPE(upstream.same_shape(src), "bilinear_warp_backward: upstream shape");
  WarpGradients g;
  g.grad_src = Image(src.height, src.width, src.channels);
  g.grad_flow = FlowField(src.height, src.width);
  for (int c = 0; c < src.channels; ++c)
    warp_plane_backward(src.plane(c), flow.dx.data(), flow.dy.data(),
                        upstream.plane(c), g.grad_src.plane(c),
                        g.grad_flow.dx.data(), g.grad_flow.dy.data(), src.height,
                        src.width);
  return g;
}

/// Forward-backward consistency mask: a pixel is valid when following the
/// forward flow and then the (sampled) backward flow returns within tol px.
inline ValidMask valid_mask(const FlowField& fw, const FlowField& bw, float tol) {
  LFV_CHECK_SHAPE(fw.same_shape(bw), "valid_mask: flow shapes differ");
  ValidMask mask(fw.height, fw.width);
  const int h = fw.height, w = fw.width;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      size_t i = static_cast<size_t>(y) * w + x;
      float tx = x + fw.dx[i];
      float ty = y + fw.dy[i];
      float bx = core::bilinear_sample_plane(bw.dx.data(), h, w, tx, ty);
      float by = core::bilinear_sample_plane(bw.dy.data(), h, w, tx, ty);
      float rx = fw.dx[i] + bx;
      float ry = fw.dy[i] + by;
      mask.m[i] = std::sqrt(rx * rx + ry * ry) <= tol ? 1 : 0;
    }
  return mask;
}

/// Optical-flow-based warping error of a light field frame pair: every
/// non-center view of lf_t is warped by the shared flow and compared with
/// lf_prev under the valid mask,
///   E = 1/(UV-1) * sum_u [ ||M (warp(lf_t[u]) - lf_prev[u])||_1 / sum_n M ].
/// Multi-channel views contribute the per-pixel mean over channels.
inline double temporal_error(const LightFieldFrame& lf_t,
                             const LightFieldFrame& lf_prev,
                             const FlowField& flow_t_to_prev,
                             const ValidMask& mask) {
  lf_t.validate();
  lf_prev.validate();
  LFV_CHECK_SHAPE(lf_t.height() == lf_prev.height() && lf_t.width() == lf_prev.width() &&
                      lf_t.channels() == lf_prev.channels(),
                  "temporal_error: frame shapes differ");
  LFV_CHECK_SHAPE(lf_t.height() == flow_t_to_prev.height &&
                      lf_t.width() == flow_t_to_prev.width,
                  "temporal_error: flow shape differs");
  LFV_CHECK_SHAPE(mask.height == lf_t.height() && mask.width == lf_t.width(),
                  "temporal_error: mask shape differs");
  const size_t n_valid = mask.count();
  LFV_CHECK_DOMAIN(n_valid > 0, "temporal_error: empty valid mask, metric undefined");

  const int c = lf_t.channels();
  double sum = 0.0;
  for (int i = 0; i < core::kNumViews; ++i) {
    AngularCoord a = core::view_coord(i);
    if (a.u == 0 && a.v == 0) continue;  // center view equals the input frame
    Image warped = bilinear_warp(lf_t.sais[i], flow_t_to_prev);
    const Image& target = lf_prev.sais[i];
    double l1 = 0.0;
    for (size_t p = 0; p < mask.pixels(); ++p) {
      if (!mask.m[p]) continue;
      double acc = 0.0;
      for (int ch = 0; ch < c; ++ch)
        acc += std::abs(static_cast<double>(warped.data[ch * mask.pixels() + p]) -
                        target.data[ch * mask.pixels() + p]);
      l1 += acc / c;
    }
    sum += l1 / static_cast<double>(n_valid);
  }
  return sum / static_cast<double>(core::kNumViews - 1);
}

}  // namespace lfv::warp
