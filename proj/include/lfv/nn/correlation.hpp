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

#include "lfv/nn/tensor.hpp"

namespace lfv::nn {

/// Dense correlation cost volume between two feature maps:
///   out(dy, dx, p) = 1/C * sum_c a(c, p) * b(c, p + (dx, dy))
/// for every displacement in [-max_disp, max_disp]^2, zero outside b's
/// support. Displacement channels are raster ordered, dy-major, so channel
/// (dy+d)*(2d+1) + (dx+d) holds displacement (dx, dy); the zero displacement
/// sits in the middle channel. Differentiable in both inputs.
template <class T>
inline Tensor<T> correlation(const Tensor<T>& a, const Tensor<T>& b, int max_disp) {
  LFV_CHECK_SHAPE(a.ndim() == 4 && b.ndim() == 4, "correlation expects [N,C,H,W]");
  check_same_shape(a, b, "correlation");
  LFV_CHECK_DOMAIN(max_disp >= 0, "correlation: negative displacement range");
  const int64_t n = a.dim(0), c = a.dim(1), h = a.dim(2), w = a.dim(3);
  const int64_t side = 2 * static_cast<int64_t>(max_disp) + 1;
  const int64_t nd = side * side;
  const T inv_c = T(1) / static_cast<T>(c);

  std::vector<T> out(static_cast<size_t>(n * nd * h * w), T(0));
  const T* av = a.values().data();
  const T* bv = b.values().data();
  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t ic = 0; ic < c; ++ic) {
      const T* ap = av + (bn * c + ic) * h * w;
      const T* bp = bv + (bn * c + ic) * h * w;
      for (int64_t dy = -max_disp; dy <= max_disp; ++dy) {
        for (int64_t dx = -max_disp; dx <= max_disp; ++dx) {
          const int64_t di = (dy + max_disp) * side + (dx + max_disp);
          T* op = out.data() + (bn * nd + di) * h * w;
          const int64_t y0 = std::max<int64_t>(0, -dy), y1 = std::min(h, h - dy);
          const int64_t x0 = std::max<int64_t>(0, -dx), x1 = std::min(w, w - dx);
          for (int64_t y = y0; y < y1; ++y) {
            const T* arow = ap + y * w;
            const T* brow = bp + (y + dy) * w + dx;
            T* orow = op + y * w;
            for (int64_t x = x0; x < x1; ++x) orow[x] += arow[x] * brow[x];
          }
        }
      }
    }
  }
  for (auto& v : out) v *= inv_c;

  auto ai = a.impl(), bi = b.impl();
  return detail::make_op<T>(
      {n, nd, h, w}, std::move(out), {a, b},
      [ai, bi, n, c, h, w, max_disp, side, nd, inv_c](auto& self) {
        const T* go = self.g.data();
        for (int64_t bn = 0; bn < n; ++bn) {
          for (int64_t ic = 0; ic < c; ++ic) {
            const T* ap = ai->v.data() + (bn * c + ic) * h * w;
            const T* bp = bi->v.data() + (bn * c + ic) * h * w;
            T* gap = ai->tracked ? ai->g.data() + (bn * c + ic) * h * w : nullptr;
            T* gbp = bi->tracked ? bi->g.data() + (bn * c + ic) * h * w : nullptr;
            for (int64_t dy = -max_disp; dy <= max_disp; ++dy) {
              for (int64_t dx = -max_disp; dx <= max_disp; ++dx) {
                const int64_t di = (dy + max_disp) * side + (dx + max_disp);
                const T* gp = go + (bn * nd + di) * h * w;
                const int64_t y0 = std::max<int64_t>(0, -dy), y1 = std::min(h, h - dy);
                const int64_t x0 = std::max<int64_t>(0, -dx), x1 = std::min(w, w - dx);
                for (int64_t y = y0; y < y1; ++y) {
                  const T* grow = gp + y * w;
                  const T* arow = ap + y * w;
                  const T* brow = bp + (y + dy) * w + dx;
                  T* garow = gap ? gap + y * w : nullptr;
                  T* gbrow = gbp ? gbp + (y + dy) * w + dx : nullptr;
                  for (int64_t x = x0; x < x1; ++x) {
                    const T g = grow[x] * inv_c;
                    if (garow) garow[x] += g * brow[x];
                    if (gbrow) gbrow[x] += g * arow[x];
                  }
                }
              }
            }
          }
        }
      },
      "correlation");
}

}  // namespace lfv::nn
