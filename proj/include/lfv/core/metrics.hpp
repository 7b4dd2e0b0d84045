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
#include <limits>
#include <vector>

#include "lfv/core/image.hpp"
#include "lfv/core/lightfield_ops.hpp"

namespace lfv::core {

/// Mean squared error over all channels and pixels.
inline double mse(const Image& a, const Image& b) {
  LFV_CHECK_SHAPE(a.same_shape(b), "mse: image shapes differ");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

/// PSNR in dB for values in [0, 1]. Identical images give +infinity.
inline double psnr(const Image& a, const Image& b) {
  double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

/// Interior-cropped PSNR, ignoring a border band where edge clamping and
/// warping artifacts live.
inline double psnr_interior(const Image& a, const Image& b, int border) {
  LFV_CHECK_SHAPE(a.same_shape(b), "psnr_interior: image shapes differ");
  LFV_CHECK_DOMAIN(2 * border < std::min(a.height, a.width), "border too large");
  double acc = 0.0;
  size_t n = 0;
  for (int c = 0; c < a.channels; ++c)
    for (int y = border; y < a.height - border; ++y)
      for (int x = border; x < a.width - border; ++x) {
        double d = static_cast<double>(a.at(c, y, x)) - b.at(c, y, x);
        acc += d * d;
        ++n;
      }
  double m = acc / static_cast<double>(n);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

namespace detail {
inline std::vector<double> gaussian_window_11_sigma15() {
  std::vector<double> w(11 * 11);
  double sum = 0.0;
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 11; ++x) {
      double dx = x - 5, dy = y - 5;
      double v = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
      w[y * 11 + x] = v;
      sum += v;
    }
  for (auto& v : w) v /= sum;
  return w;
}
}  // namespace detail

/// Mean structural similarity with the reference 11x11 Gaussian window
/// (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1. Windows are evaluated
/// only where they fit entirely inside the image.
inline double ssim(const Image& a, const Image& b) {
  LFV_CHECK_SHAPE(a.same_shape(b), "ssim: image shapes differ");
  LFV_CHECK_SHAPE(a.channels == 1, "ssim expects single-channel images");
  LFV_CHECK_DOMAIN(a.height >= 11 && a.width >= 11,
                   "ssim needs at least 11x11 pixels");
  static const std::vector<double> win = detail::gaussian_window_11_sigma15();
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;

  double total = 0.0;
  size_t count = 0;
  for (int y = 0; y + 11 <= a.height; ++y) {
    for (int x = 0; x + 11 <= a.width; ++x) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      for (int wy = 0; wy < 11; ++wy)
        for (int wx = 0; wx < 11; ++wx) {
          double w = win[wy * 11 + wx];
          double va = a.at(0, y + wy, x + wx);
          double vb = b.at(0, y + wy, x + wx);
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      double var_a = aa - mu_a * mu_a;
      double var_b = bb - mu_b * mu_b;
      double cov = ab - mu_a * mu_b;
      double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
      double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace lfv::core
