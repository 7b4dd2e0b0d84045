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

#include <vector>

#include "lfv/nn/ops.hpp"
#include "lfv/nn/tensor.hpp"

namespace lfv::nn {

inline int64_t conv_out_extent(int64_t in, int64_t k, int64_t stride, int64_t pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// The convolution loops are written in saxpy form: one kernel scalar applied
// to a contiguous input row accumulating into a contiguous output row, which
// the compiler turns into FMA vector code. Zero padding is realized by row
// range clipping.

namespace detail {

template <class T>
void conv2d_forward(const T* x, const T* w, const T* b, T* out, int64_t n,
                    int64_t ci, int64_t h, int64_t wd, int64_t co, int64_t kh,
                    int64_t kw, int64_t s, int64_t p, int64_t ho, int64_t wo) {
  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oc = 0; oc < co; ++oc) {
      T* oplane = out + (bn * co + oc) * ho * wo;
      const T bias = b ? b[oc] : T(0);
      for (int64_t i = 0; i < ho * wo; ++i) oplane[i] = bias;
      for (int64_t ic = 0; ic < ci; ++ic) {
        const T* xplane = x + (bn * ci + ic) * h * wd;
        for (int64_t ky = 0; ky < kh; ++ky) {
          for (int64_t kx = 0; kx < kw; ++kx) {
            const T wv = w[((oc * ci + ic) * kh + ky) * kw + kx];
            if (wv == T(0)) continue;
            // valid output column range for this kernel tap
            int64_t ox0 = std::max<int64_t>(0, (p - kx + s - 1) / s);
            int64_t ox1 = std::min(wo, (wd - 1 + p - kx) / s + 1);
            if (ox0 >= ox1) continue;
            for (int64_t oy = 0; oy < ho; ++oy) {
              const int64_t iy = oy * s - p + ky;
              if (iy < 0 || iy >= h) continue;
              const T* xrow = xplane + iy * wd - p + kx;
              T* orow = oplane + oy * wo;
              if (s == 1) {
                for (int64_t ox = ox0; ox < ox1; ++ox) orow[ox] += wv * xrow[ox];
              } else {
                for (int64_t ox = ox0; ox < ox1; ++ox) orow[ox] += wv * xrow[ox * s];
              }
            }
          }
        }
      }
    }
  }
}

template <class T>
void conv2d_backward(const T* x, const T* w, const T* go, T* gx, T* gw, T* gb,
                     int64_t n, int64_t ci, int64_t h, int64_t wd, int64_t co,
                     int64_t kh, int64_t kw, int64_t s, int64_t p, int64_t ho,
                     int64_t wo) {
  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oc = 0; oc < co; ++oc) {
      const T* goplane = go + (bn * co + oc) * ho * wo;
      if (gb) {
        T acc = T(0);
        for (int64_t i = 0; i < ho * wo; ++i) acc += goplane[i];
        gb[oc] += acc;
      }
      for (int64_t ic = 0; ic < ci; ++ic) {
        const T* xplane = x + (bn * ci + ic) * h * wd;
        T* gxplane = gx ? gx + (bn * ci + ic) * h * wd : nullptr;
        for (int64_t ky = 0; ky < kh; ++ky) {
          for (int64_t kx = 0; kx < kw; ++kx) {
            const int64_t widx = ((oc * ci + ic) * kh + ky) * kw + kx;
            const T wv = w[widx];
            int64_t ox0 = std::max<int64_t>(0, (p - kx + s - 1) / s);
            int64_t ox1 = std::min(wo, (wd - 1 + p - kx) / s + 1);
            if (ox0 >= ox1) continue;
            T wacc = T(0);
            for (int64_t oy = 0; oy < ho; ++oy) {
              const int64_t iy = oy * s - p + ky;
              if (iy < 0 || iy >= h) continue;
              const T* gorow = goplane + oy * wo;
              const T* xrow = xplane + iy * wd - p + kx;
              T* gxrow = gxplane ? gxplane + iy * wd - p + kx : nullptr;
              if (s == 1) {
                for (int64_t ox = ox0; ox < ox1; ++ox) wacc += gorow[ox] * xrow[ox];
                if (gxrow && wv != T(0))
                  for (int64_t ox = ox0; ox < ox1; ++ox) gxrow[ox] += wv * gorow[ox];
              } else {
                for (int64_t ox = ox0; ox < ox1; ++ox) wacc += gorow[ox] * xrow[ox * s];
                if (gxrow && wv != T(0))
                  for (int64_t ox = ox0; ox < ox1; ++ox) gxrow[ox * s] += wv * gorow[ox];
              }
            }
            if (gw) gw[widx] += wacc;
          }
        }
      }
    }
  }
}

}  // namespace detail

/// 2D cross-correlation of x [N,Ci,H,W] with kernels w [Co,Ci,kH,kW], zero
/// padded, plus optional bias [Co]. Differentiable in x, w, and bias.
template <class T>
inline Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                        int64_t stride, int64_t pad) {
  LFV_CHECK_SHAPE(x.ndim() == 4, "conv2d input must be [N,C,H,W], got ",
                  shape_str(x.shape()));
  LFV_CHECK_SHAPE(w.ndim() == 4, "conv2d kernel must be [Co,Ci,kH,kW]");
  const int64_t n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int64_t co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  LFV_CHECK_SHAPE(w.dim(1) == ci, "conv2d: input has ", ci, " channels, kernel expects ",
                  w.dim(1));
  const bool has_bias = bias.defined() && bias.numel() > 0;
  if (has_bias)
    LFV_CHECK_SHAPE(bias.numel() == co, "conv2d: bias size mismatch");
  LFV_CHECK_USAGE(stride >= 1 && pad >= 0, "conv2d: bad stride/pad");
  const int64_t ho = conv_out_extent(h, kh, stride, pad);
  const int64_t wo = conv_out_extent(wd, kw, stride, pad);
  LFV_CHECK_SHAPE(ho >= 1 && wo >= 1, "conv2d: output would be empty");

  std::vector<T> out(static_cast<size_t>(n * co * ho * wo));
  detail::conv2d_forward(x.values().data(), w.values().data(),
                         has_bias ? bias.values().data() : nullptr, out.data(), n,
                         ci, h, wd, co, kh, kw, stride, pad, ho, wo);

  auto xi = x.impl(), wi = w.impl();
  auto bi = has_bias ? bias.impl() : nullptr;
  std::vector<Tensor<T>> inputs = {x, w};
  if (has_bias) inputs.push_back(bias);
  return nn::detail::make_op<T>(
      {n, co, ho, wo}, std::move(out), inputs,
      [=](auto& self) {
        detail::conv2d_backward(xi->v.data(), wi->v.data(), self.g.data(),
                                xi->tracked ? xi->g.data() : nullptr,
                                wi->tracked ? wi->g.data() : nullptr,
                                (bi && bi->tracked) ? bi->g.data() : nullptr, n, ci,
                                h, wd, co, kh, kw, stride, pad, ho, wo);
      },
      "conv2d");
}

namespace detail {

template <class T>
void conv3d_forward(const T* x, const T* w, const T* b, T* out, int64_t n,
                    int64_t ci, int64_t d, int64_t h, int64_t wd, int64_t co,
                    int64_t kd, int64_t kh, int64_t kw, int64_t ss, int64_t ps,
                    int64_t pd, int64_t dO, int64_t ho, int64_t wo) {
  // depth (angular) axis always has stride 1
  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oc = 0; oc < co; ++oc) {
      T* ovol = out + (bn * co + oc) * dO * ho * wo;
      const T bias = b ? b[oc] : T(0);
      for (int64_t i = 0; i < dO * ho * wo; ++i) ovol[i] = bias;
      for (int64_t ic = 0; ic < ci; ++ic) {
        const T* xvol = x + (bn * ci + ic) * d * h * wd;
        for (int64_t kz = 0; kz < kd; ++kz)
          for (int64_t ky = 0; ky < kh; ++ky)
            for (int64_t kx = 0; kx < kw; ++kx) {
              const T wv = w[(((oc * ci + ic) * kd + kz) * kh + ky) * kw + kx];
              if (wv == T(0)) continue;
              int64_t ox0 = std::max<int64_t>(0, (ps - kx + ss - 1) / ss);
              int64_t ox1 = std::min(wo, (wd - 1 + ps - kx) / ss + 1);
              if (ox0 >= ox1) continue;
              for (int64_t oz = 0; oz < dO; ++oz) {
                const int64_t iz = oz - pd + kz;
                if (iz < 0 || iz >= d) continue;
                for (int64_t oy = 0; oy < ho; ++oy) {
                  const int64_t iy = oy * ss - ps + ky;
                  if (iy < 0 || iy >= h) continue;
                  const T* xrow = xvol + (iz * h + iy) * wd - ps + kx;
                  T* orow = ovol + (oz * ho + oy) * wo;
                  if (ss == 1) {
                    for (int64_t ox = ox0; ox < ox1; ++ox) orow[ox] += wv * xrow[ox];
                  } else {
                    for (int64_t ox = ox0; ox < ox1; ++ox)
                      orow[ox] += wv * xrow[ox * ss];
                  }
                }
              }
            }
      }
    }
  }
}

template <class T>
void conv3d_backward(const T* x, const T* w, const T* go, T* gx, T* gw, T* gb,
                     int64_t n, int64_t ci, int64_t d, int64_t h, int64_t wd,
                     int64_t co, int64_t kd, int64_t kh, int64_t kw, int64_t ss,
                     int64_t ps, int64_t pd, int64_t dO, int64_t ho, int64_t wo) {
  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oc = 0; oc < co; ++oc) {
      const T* govol = go + (bn * co + oc) * dO * ho * wo;
      if (gb) {
        T acc = T(0);
        for (int64_t i = 0; i < dO * ho * wo; ++i) acc += govol[i];
        gb[oc] += acc;
      }
      for (int64_t ic = 0; ic < ci; ++ic) {
        const T* xvol = x + (bn * ci + ic) * d * h * wd;
        T* gxvol = gx ? gx + (bn * ci + ic) * d * h * wd : nullptr;
        for (int64_t kz = 0; kz < kd; ++kz)
          for (int64_t ky = 0; ky < kh; ++ky)
            for (int64_t kx = 0; kx < kw; ++kx) {
              const int64_t widx = (((oc * ci + ic) * kd + kz) * kh + ky) * kw + kx;
              const T wv = w[widx];
              int64_t ox0 = std::max<int64_t>(0, (ps - kx + ss - 1) / ss);
              int64_t ox1 = std::min(wo, (wd - 1 + ps - kx) / ss + 1);
              if (ox0 >= ox1) continue;
              T wacc = T(0);
              for (int64_t oz = 0; oz < dO; ++oz) {
                const int64_t iz = oz - pd + kz;
                if (iz < 0 || iz >= d) continue;
                for (int64_t oy = 0; oy < ho; ++oy) {
                  const int64_t iy = oy * ss - ps + ky;
                  if (iy < 0 || iy >= h) continue;
                  const T* gorow = govol + (oz * ho + oy) * wo;
                  const T* xrow = xvol + (iz * h + iy) * wd - ps + kx;
                  T* gxrow = gxvol ? gxvol + (iz * h + iy) * wd - ps + kx : nullptr;
                  if (ss == 1) {
                    for (int64_t ox = ox0; ox < ox1; ++ox) wacc += gorow[ox] * xrow[ox];
                    if (gxrow && wv != T(0))
                      for (int64_t ox = ox0; ox < ox1; ++ox)
                        gxrow[ox] += wv * gorow[ox];
                  } else {
                    for (int64_t ox = ox0; ox < ox1; ++ox)
                      wacc += gorow[ox] * xrow[ox * ss];
                    if (gxrow && wv != T(0))
                      for (int64_t ox = ox0; ox < ox1; ++ox)
                        gxrow[ox * ss] += wv * gorow[ox];
                  }
                }
              }
              if (gw) gw[widx] += wacc;
            }
      }
    }
  }
}

}  // namespace detail

/// 3D cross-correlation of x [N,C,D,H,W] with kernels [Co,Ci,kD,kH,kW].
/// The depth axis (angular) is never strided; spatial stride applies to H/W.
template <class T>
inline Tensor<T> conv3d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                        int64_t spatial_stride, int64_t spatial_pad, int64_t depth_pad) {
  LFV_CHECK_SHAPE(x.ndim() == 5, "conv3d input must be [N,C,D,H,W]");
  LFV_CHECK_SHAPE(w.ndim() == 5, "conv3d kernel must be [Co,Ci,kD,kH,kW]");
  const int64_t n = x.dim(0), ci = x.dim(1), d = x.dim(2), h = x.dim(3), wd = x.dim(4);
  const int64_t co = w.dim(0), kd = w.dim(2), kh = w.dim(3), kw = w.dim(4);
  LFV_CHECK_SHAPE(w.dim(1) == ci, "conv3d: channel mismatch");
  const bool has_bias = bias.defined() && bias.numel() > 0;
  if (has_bias)
    LFV_CHECK_SHAPE(bias.numel() == co, "conv3d: bias size mismatch");
  const int64_t dO = d + 2 * depth_pad - kd + 1;
  const int64_t ho = conv_out_extent(h, kh, spatial_stride, spatial_pad);
  const int64_t wo = conv_out_extent(wd, kw, spatial_stride, spatial_pad);
  LFV_CHECK_SHAPE(dO >= 1 && ho >= 1 && wo >= 1, "conv3d: output would be empty");

  std::vector<T> out(static_cast<size_t>(n * co * dO * ho * wo));
  detail::conv3d_forward(x.values().data(), w.values().data(),
                         has_bias ? bias.values().data() : nullptr, out.data(), n,
                         ci, d, h, wd, co, kd, kh, kw, spatial_stride, spatial_pad,
                         depth_pad, dO, ho, wo);

  auto xi = x.impl(), wi = w.impl();
  auto bi = has_bias ? bias.impl() : nullptr;
  std::vector<Tensor<T>> inputs = {x, w};
  if (has_bias) inputs.push_back(bias);
  return nn::detail::make_op<T>(
      {n, co, dO, ho, wo}, std::move(out), inputs,
      [=](auto& self) {
        detail::conv3d_backward(xi->v.data(), wi->v.data(), self.g.data(),
                                xi->tracked ? xi->g.data() : nullptr,
                                wi->tracked ? wi->g.data() : nullptr,
                                (bi && bi->tracked) ? bi->g.data() : nullptr, n, ci,
                                d, h, wd, co, kd, kh, kw, spatial_stride,
                                spatial_pad, depth_pad, dO, ho, wo);
      },
      "conv3d");
}

}  // namespace lfv::nn
