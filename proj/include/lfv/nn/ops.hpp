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

#include "lfv/nn/tensor.hpp"

namespace lfv::nn {

template <class T>
inline void check_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  LFV_CHECK_SHAPE(a.shape() == b.shape(), op, ": shapes ", shape_str(a.shape()),
                  " and ", shape_str(b.shape()), " differ");
}

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

template <class T>
inline Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "add");
  std::vector<T> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.values()[i];
  auto ai = a.impl(), bi = b.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a, b},
      [ai, bi](auto& self) {
        if (ai->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) ai->g[i] += self.g[i];
        if (bi->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) bi->g[i] += self.g[i];
      },
      "add");
}

template <class T>
inline Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "sub");
  std::vector<T> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] -= b.values()[i];
  auto ai = a.impl(), bi = b.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a, b},
      [ai, bi](auto& self) {
        if (ai->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) ai->g[i] += self.g[i];
        if (bi->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) bi->g[i] -= self.g[i];
      },
      "sub");
}

template <class T>
inline Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "mul");
  std::vector<T> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.values()[i];
  auto ai = a.impl(), bi = b.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a, b},
      [ai, bi](auto& self) {
        if (ai->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) ai->g[i] += self.g[i] * bi->v[i];
        if (bi->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) bi->g[i] += self.g[i] * ai->v[i];
      },
      "mul");
}

template <class T>
inline Tensor<T> scale(const Tensor<T>& a, T c) {
  std::vector<T> out(a.values());
  for (auto& v : out) v *= c;
  auto ai = a.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a},
      [ai, c](auto& self) {
        if (ai->tracked)
          for (size_t i = 0; i < self.g.size(); ++i) ai->g[i] += self.g[i] * c;
      },
      "scale");
}

template <class T>
inline Tensor<T> abs_op(const Tensor<T>& a) {
  std::vector<T> out(a.values());
  for (auto& v : out) v = std::abs(v);
  auto ai = a.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a},
      [ai](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < self.g.size(); ++i) {
          T s = ai->v[i] > T(0) ? T(1) : (ai->v[i] < T(0) ? T(-1) : T(0));
          ai->g[i] += self.g[i] * s;
        }
      },
      "abs");
}

template <class T>
inline Tensor<T> leaky_relu(const Tensor<T>& a, T slope = T(0.2)) {
  std::vector<T> out(a.values());
  for (auto& v : out) v = v >= T(0) ? v : slope * v;
  auto ai = a.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a},
      [ai, slope](auto& self) {
        if (!ai->tracked) return;
        // Subgradient at 0 takes the positive branch.
        for (size_t i = 0; i < self.g.size(); ++i)
          ai->g[i] += self.g[i] * (ai->v[i] >= T(0) ? T(1) : slope);
      },
      "leaky_relu");
}

/// tanh with the output range contract (-1, 1) enforced even where the
/// rounded math function saturates to exactly +/-1.
template <class T>
inline Tensor<T> tanh_op(const Tensor<T>& a) {
  std::vector<T> out(a.values());
  for (auto& v : out) {
    v = std::tanh(v);
    if (v >= T(1)) v = std::nextafter(T(1), T(0));
    if (v <= T(-1)) v = std::nextafter(T(-1), T(0));
  }
  auto ai = a.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a},
      [ai](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < self.g.size(); ++i) {
          T y = self.v[i];
          ai->g[i] += self.g[i] * (T(1) - y * y);
        }
      },
      "tanh");
}

/// Clamp with a pass-through subgradient inside [lo, hi] and zero outside.
template <class T>
inline Tensor<T> clamp_op(const Tensor<T>& a, T lo, T hi) {
  std::vector<T> out(a.values());
  for (auto& v : out) v = std::clamp(v, lo, hi);
  auto ai = a.impl();
  return detail::make_op<T>(
      a.shape(), std::move(out), {a},
      [ai, lo, hi](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < self.g.size(); ++i)
          if (ai->v[i] >= lo && ai->v[i] <= hi) ai->g[i] += self.g[i];
      },
      "clamp");
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <class T>
inline Tensor<T> sum(const Tensor<T>& a) {
  T acc = T(0);
  for (T v : a.values()) acc += v;
  auto ai = a.impl();
  return detail::make_op<T>(
      {1}, {acc}, {a},
      [ai](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < ai->g.size(); ++i) ai->g[i] += self.g[0];
      },
      "sum");
}

template <class T>
inline Tensor<T> mean(const Tensor<T>& a) {
  T acc = T(0);
  for (T v : a.values()) acc += v;
  T inv = T(1) / static_cast<T>(a.numel());
  auto ai = a.impl();
  return detail::make_op<T>(
      {1}, {acc * inv}, {a},
      [ai, inv](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < ai->g.size(); ++i) ai->g[i] += self.g[0] * inv;
      },
      "mean");
}

/// Mean absolute value, the L1 building block of every loss.
template <class T>
inline Tensor<T> mean_abs(const Tensor<T>& a) {
  return mean(abs_op(a));
}

/// Mean over axis 0: [N, ...] -> [1, ...].
template <class T>
inline Tensor<T> mean_axis0(const Tensor<T>& a) {
  LFV_CHECK_SHAPE(a.ndim() >= 1, "mean_axis0 needs at least one axis");
  const int64_t n = a.dim(0);
  const int64_t rest = a.numel() / n;
  std::vector<T> out(static_cast<size_t>(rest), T(0));
  const auto& v = a.values();
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < rest; ++j) out[j] += v[i * rest + j];
  T inv = T(1) / static_cast<T>(n);
  for (auto& x : out) x *= inv;
  Shape s = a.shape();
  s[0] = 1;
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(s), std::move(out), {a},
      [ai, n, rest, inv](auto& self) {
        if (!ai->tracked) return;
        for (int64_t i = 0; i < n; ++i)
          for (int64_t j = 0; j < rest; ++j) ai->g[i * rest + j] += self.g[j] * inv;
      },
      "mean_axis0");
}

// ---------------------------------------------------------------------------
// Shape manipulation
// ---------------------------------------------------------------------------

template <class T>
inline Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  LFV_CHECK_SHAPE(shape_numel(shape) == a.numel(), "reshape ", shape_str(a.shape()),
                  " -> ", shape_str(shape), " changes the element count");
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(shape), std::vector<T>(a.values()), {a},
      [ai](auto& self) {
        if (!ai->tracked) return;
        for (size_t i = 0; i < self.g.size(); ++i) ai->g[i] += self.g[i];
      },
      "reshape");
}

/// Concatenation along an arbitrary axis.
template <class T>
inline Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  LFV_CHECK_USAGE(!parts.empty(), "concat of zero tensors");
  const int nd = parts[0].ndim();
  LFV_CHECK_SHAPE(axis >= 0 && axis < nd, "concat axis out of range");
  Shape out_shape = parts[0].shape();
  int64_t axis_total = 0;
  for (const auto& p : parts) {
    LFV_CHECK_SHAPE(p.ndim() == nd, "concat: rank mismatch");
    for (int d = 0; d < nd; ++d)
      if (d != axis)
        LFV_CHECK_SHAPE(p.dim(d) == out_shape[d], "concat: shape mismatch on axis ", d);
    axis_total += p.dim(axis);
  }
  out_shape[axis] = axis_total;

  int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= out_shape[d];
  for (int d = axis + 1; d < nd; ++d) inner *= out_shape[d];

  std::vector<T> out(static_cast<size_t>(shape_numel(out_shape)));
  std::vector<int64_t> offsets(parts.size());
  {
    int64_t off = 0;
    for (size_t k = 0; k < parts.size(); ++k) {
      offsets[k] = off;
      const auto& v = parts[k].values();
      const int64_t ax = parts[k].dim(axis);
      for (int64_t o = 0; o < outer; ++o)
        std::copy(v.begin() + o * ax * inner, v.begin() + (o + 1) * ax * inner,
                  out.begin() + (o * axis_total + off) * inner);
      off += ax;
    }
  }

  std::vector<std::shared_ptr<typename Tensor<T>::Impl>> impls;
  std::vector<int64_t> axes;
  for (const auto& p : parts) {
    impls.push_back(p.impl());
    axes.push_back(p.dim(axis));
  }
  return detail::make_op<T>(
      std::move(out_shape), std::move(out), parts,
      [impls, axes, outer, inner, axis_total](auto& self) {
        int64_t off = 0;
        for (size_t k = 0; k < impls.size(); ++k) {
          const int64_t ax = axes[k];
          if (impls[k]->tracked) {
            auto& g = impls[k]->g;
            for (int64_t o = 0; o < outer; ++o) {
              const T* src = self.g.data() + (o * axis_total + off) * inner;
              T* dst = g.data() + o * ax * inner;
              for (int64_t i = 0; i < ax * inner; ++i) dst[i] += src[i];
            }
          }
          off += ax;
        }
      },
      "concat");
}

/// Select one slice along axis 0, keeping the axis: [N, ...] -> [1, ...].
template <class T>
inline Tensor<T> slice0(const Tensor<T>& a, int64_t index) {
  LFV_CHECK_SHAPE(index >= 0 && index < a.dim(0), "slice0 index out of range");
  const int64_t rest = a.numel() / a.dim(0);
  std::vector<T> out(a.values().begin() + index * rest,
                     a.values().begin() + (index + 1) * rest);
  Shape s = a.shape();
  s[0] = 1;
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(s), std::move(out), {a},
      [ai, index, rest](auto& self) {
        if (!ai->tracked) return;
        for (int64_t j = 0; j < rest; ++j) ai->g[index * rest + j] += self.g[j];
      },
      "slice0");
}

/// Channel range of a [N, C, ...] tensor: channels [c0, c0+len).
template <class T>
inline Tensor<T> narrow_channels(const Tensor<T>& a, int64_t c0, int64_t len) {
  LFV_CHECK_SHAPE(a.ndim() >= 2, "narrow_channels needs [N, C, ...]");
  const int64_t n = a.dim(0), c = a.dim(1);
  LFV_CHECK_SHAPE(c0 >= 0 && c0 + len <= c, "channel range out of bounds");
  const int64_t inner = a.numel() / (n * c);
  Shape s = a.shape();
  s[1] = len;
  std::vector<T> out(static_cast<size_t>(n * len * inner));
  for (int64_t b = 0; b < n; ++b)
    std::copy(a.values().begin() + (b * c + c0) * inner,
              a.values().begin() + (b * c + c0 + len) * inner,
              out.begin() + b * len * inner);
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(s), std::move(out), {a},
      [ai, n, c, c0, len, inner](auto& self) {
        if (!ai->tracked) return;
        for (int64_t b = 0; b < n; ++b) {
          const T* src = self.g.data() + b * len * inner;
          T* dst = ai->g.data() + (b * c + c0) * inner;
          for (int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
        }
      },
      "narrow_channels");
}

/// Contiguous range along one axis: indices [start, start+len) of `axis`.
template <class T>
inline Tensor<T> narrow_axis(const Tensor<T>& a, int axis, int64_t start, int64_t len) {
  const int nd = a.ndim();
  LFV_CHECK_SHAPE(axis >= 0 && axis < nd, "narrow_axis: axis out of range");
  LFV_CHECK_SHAPE(start >= 0 && start + len <= a.dim(axis),
                  "narrow_axis: range out of bounds");
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= a.dim(d);
  for (int d = axis + 1; d < nd; ++d) inner *= a.dim(d);
  const int64_t ax = a.dim(axis);
  Shape s = a.shape();
  s[axis] = len;
  std::vector<T> out(static_cast<size_t>(outer * len * inner));
  for (int64_t o = 0; o < outer; ++o)
    std::copy(a.values().begin() + (o * ax + start) * inner,
              a.values().begin() + (o * ax + start + len) * inner,
              out.begin() + o * len * inner);
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(s), std::move(out), {a},
      [ai, outer, inner, ax, start, len](auto& self) {
        if (!ai->tracked) return;
        for (int64_t o = 0; o < outer; ++o) {
          const T* src = self.g.data() + o * len * inner;
          T* dst = ai->g.data() + (o * ax + start) * inner;
          for (int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
        }
      },
      "narrow_axis");
}

/// Axis permutation; perm[i] names the source axis landing at position i.
template <class T>
inline Tensor<T> permute(const Tensor<T>& a, const std::vector<int>& perm) {
  const int nd = a.ndim();
  LFV_CHECK_SHAPE(static_cast<int>(perm.size()) == nd, "permute: rank mismatch");
  Shape out_shape(nd);
  for (int i = 0; i < nd; ++i) out_shape[i] = a.dim(perm[i]);

  std::vector<int64_t> in_strides(nd, 1), out_strides(nd, 1);
  for (int i = nd - 2; i >= 0; --i) in_strides[i] = in_strides[i + 1] * a.dim(i + 1);
  for (int i = nd - 2; i >= 0; --i)
    out_strides[i] = out_strides[i + 1] * out_shape[i + 1];

  // source stride for each output axis
  std::vector<int64_t> src_stride(nd);
  for (int i = 0; i < nd; ++i) src_stride[i] = in_strides[perm[i]];

  const int64_t total = a.numel();
  std::vector<T> out(static_cast<size_t>(total));
  const auto& v = a.values();
  std::vector<int64_t> idx(nd, 0);
  for (int64_t o = 0, src = 0; o < total; ++o) {
    out[o] = v[src];
    for (int d = nd - 1; d >= 0; --d) {
      src += src_stride[d];
      if (++idx[d] < out_shape[d]) break;
      src -= src_stride[d] * out_shape[d];
      idx[d] = 0;
    }
  }
  auto ai = a.impl();
  Shape shape_copy = out_shape;
  return detail::make_op<T>(
      std::move(out_shape), std::move(out), {a},
      [ai, src_stride, shape = std::move(shape_copy)](auto& self) {
        if (!ai->tracked) return;
        const int nd2 = static_cast<int>(shape.size());
        std::vector<int64_t> idx2(nd2, 0);
        const int64_t total2 = static_cast<int64_t>(self.g.size());
        for (int64_t o = 0, src = 0; o < total2; ++o) {
          ai->g[src] += self.g[o];
          for (int d = nd2 - 1; d >= 0; --d) {
            src += src_stride[d];
            if (++idx2[d] < shape[d]) break;
            src -= src_stride[d] * shape[d];
            idx2[d] = 0;
          }
        }
      },
      "permute");
}

/// [N,C,H,W] -> [N,C,2H,2W] nearest-neighbor upsampling (4D), or
/// [N,C,D,H,W] -> [N,C,D,2H,2W] keeping the depth axis (5D).
template <class T>
inline Tensor<T> upsample2x_spatial(const Tensor<T>& a) {
  LFV_CHECK_SHAPE(a.ndim() == 4 || a.ndim() == 5, "upsample2x expects 4D or 5D");
  const int nd = a.ndim();
  const int64_t h = a.dim(nd - 2), w = a.dim(nd - 1);
  const int64_t planes = a.numel() / (h * w);
  Shape s = a.shape();
  s[nd - 2] = 2 * h;
  s[nd - 1] = 2 * w;
  std::vector<T> out(static_cast<size_t>(planes * 4 * h * w));
  const auto& v = a.values();
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = v.data() + p * h * w;
    T* dst = out.data() + p * 4 * h * w;
    for (int64_t y = 0; y < 2 * h; ++y) {
      const T* srow = src + (y / 2) * w;
      T* drow = dst + y * 2 * w;
      for (int64_t x = 0; x < 2 * w; ++x) drow[x] = srow[x / 2];
    }
  }
  auto ai = a.impl();
  return detail::make_op<T>(
      std::move(s), std::move(out), {a},
      [ai, planes, h, w](auto& self) {
        if (!ai->tracked) return;
        for (int64_t p = 0; p < planes; ++p) {
          const T* gsrc = self.g.data() + p * 4 * h * w;
          T* gdst = ai->g.data() + p * h * w;
          for (int64_t y = 0; y < 2 * h; ++y)
            for (int64_t x = 0; x < 2 * w; ++x)
              gdst[(y / 2) * w + x / 2] += gsrc[y * 2 * w + x];
        }
      },
      "upsample2x");
}

}  // namespace lfv::nn
