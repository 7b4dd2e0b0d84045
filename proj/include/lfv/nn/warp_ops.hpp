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

#include "lfv/nn/tensor.hpp"
#include "lfv/warp/warp.hpp"

namespace lfv::nn {

/// Tape wrapper over the bilinear warp kernel: src [N,C,H,W] sampled at
/// p + flow(p) with flow [N,2,H,W] (channel 0 = dx, 1 = dy). Differentiable
/// w.r.t. both src and flow.
template <class T>
inline Tensor<T> warp_bilinear(const Tensor<T>& src, const Tensor<T>& flow) {
  LFV_CHECK_SHAPE(src.ndim() == 4 && flow.ndim() == 4, "warp expects [N,C,H,W]");
  const int64_t n = src.dim(0), c = src.dim(1), h = src.dim(2), w = src.dim(3);
  LFV_CHECK_SHAPE(flow.dim(0) == n && flow.dim(1) == 2 && flow.dim(2) == h &&
                      flow.dim(3) == w,
                  "warp: flow must be [N,2,H,W] matching the image");

  std::vector<T> out(src.values().size());
  for (int64_t bn = 0; bn < n; ++bn) {
    const T* fdx = flow.values().data() + (bn * 2 + 0) * h * w;
    const T* fdy = flow.values().data() + (bn * 2 + 1) * h * w;
    for (int64_t ic = 0; ic < c; ++ic) {
      const int64_t off = (bn * c + ic) * h * w;
      warp::warp_plane(src.values().data() + off, fdx, fdy, out.data() + off,
                       static_cast<int>(h), static_cast<int>(w));
    }
  }

  auto si = src.impl(), fi = flow.impl();
  return detail::make_op<T>(
      src.shape(), std::move(out), {src, flow},
      [si, fi, n, c, h, w](auto& self) {
        for (int64_t bn = 0; bn < n; ++bn) {
          const T* fdx = fi->v.data() + (bn * 2 + 0) * h * w;
          const T* fdy = fi->v.data() + (bn * 2 + 1) * h * w;
          T* gdx = fi->tracked ? fi->g.data() + (bn * 2 + 0) * h * w : nullptr;
          T* gdy = fi->tracked ? fi->g.data() + (bn * 2 + 1) * h * w : nullptr;
          for (int64_t ic = 0; ic < c; ++ic) {
            const int64_t off = (bn * c + ic) * h * w;
            warp::warp_plane_backward(
                si->v.data() + off, fdx, fdy, self.g.data() + off,
                si->tracked ? si->g.data() + off : nullptr, gdx, gdy,
                static_cast<int>(h), static_cast<int>(w));
          }
        }
      },
      "warp_bilinear");
}

}  // namespace lfv::nn
