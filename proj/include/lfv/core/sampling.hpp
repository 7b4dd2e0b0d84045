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

namespace lfv::core {

/// Bilinear sample of a single plane at (x, y), edge-clamped.
/// Exact for integer coordinates and for affine-valued planes.
template <class T>
inline T bilinear_sample_plane(const T* plane, int height, int width, T x, T y) {
  x = std::clamp(x, T(0), T(width - 1));
  y = std::clamp(y, T(0), T(height - 1));
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  int x1 = std::min(x0 + 1, width - 1);
  int y1 = std::min(y0 + 1, height - 1);
  T fx = x - static_cast<T>(x0);
  T fy = y - static_cast<T>(y0);
  const T v00 = plane[y0 * width + x0];
  const T v01 = plane[y0 * width + x1];
  const T v10 = plane[y1 * width + x0];
  const T v11 = plane[y1 * width + x1];
  const T top = v00 + fx * (v01 - v00);
  const T bot = v10 + fx * (v11 - v10);
  return top + fy * (bot - top);
}

/// Translate a plane by (dx, dy): out(x, y) = in(x - dx, y - dy), edge-clamped.
template <class T>
inline void shift_plane(const T* in, T* out, int height, int width, T dx, T dy) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[y * width + x] =
          bilinear_sample_plane(in, height, width, static_cast<T>(x) - dx,
                                static_cast<T>(y) - dy);
}

}  // namespace lfv::core
