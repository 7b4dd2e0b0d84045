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

#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lfv/core/common.hpp"
#include "lfv/core/image.hpp"
#include "lfv/core/sampling.hpp"
#include "lfv/nn/tensor.hpp"

namespace lfv::test {

inline core::Image random_image(int h, int w, int c, Rng& rng) {
  core::Image img(h, w, c);
  for (auto& v : img.data) v = rng.next_float();
  return img;
}

inline core::LightFieldFrame random_lightfield(int h, int w, int c, Rng& rng) {
  core::LightFieldFrame lf(h, w, c);
  for (auto& s : lf.sais)
    for (auto& v : s.data) v = rng.next_float();
  return lf;
}

inline nn::Tensor<double> random_tensor(nn::Shape shape, Rng& rng, double lo = -1.0,
                                        double hi = 1.0) {
  std::vector<double> data(static_cast<size_t>(nn::shape_numel(shape)));
  for (auto& v : data) v = rng.uniform(lo, hi);
  return nn::Tensor<double>::from_data(std::move(shape), std::move(data));
}

/// Central finite-difference check of d(build(leaves))/d(leaves[k]) against
/// the tape gradients, in double precision.
inline void expect_gradients_match(
    const std::function<nn::Tensor<double>(std::vector<nn::Tensor<double>>&)>& build,
    std::vector<nn::Tensor<double>> leaves, double eps = 1e-3, double tol = 1e-4,
    const char* what = "op") {
  for (auto& leaf : leaves) {
    leaf.set_requires_grad(true);
    leaf.zero_grad();
  }
  auto loss = build(leaves);
  nn::backward(loss);

  for (size_t k = 0; k < leaves.size(); ++k) {
    auto& leaf = leaves[k];
    for (size_t i = 0; i < leaf.values().size(); ++i) {
      const double saved = leaf.values()[i];
      leaf.values()[i] = saved + eps;
      const double f_plus = build(leaves).item();
      leaf.values()[i] = saved - eps;
      const double f_minus = build(leaves).item();
      leaf.values()[i] = saved;
      const double fd = (f_plus - f_minus) / (2.0 * eps);
      const double an = leaf.grad()[i];
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
      if (std::abs(fd) < 1e-8 && std::abs(an) < 1e-8) continue;
      const double rel = std::abs(fd - an) / denom;
      if (rel >= tol) {
        FAIL() << what << ": gradient mismatch at leaf " << k << " elem " << i
               << ": analytic " << an << " vs fd " << fd << " (rel " << rel << ")";
      }
    }
  }
  SUCCEED();
}

/// Scoped temporary directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("lfv_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// EPI stripe slope by shear search: the disparity whose per-row shear
/// aligns the views best (minimum residual vs the center row).
inline double epi_stripe_slope(const core::Image& epi, double d_min = -0.5,
                               double d_max = 3.6, double step = 0.01) {
  const int rows = epi.height;  // 9 views
  const int width = epi.width;
  const int center = rows / 2;
  double best_d = d_min, best_cost = 1e30;
  for (double d = d_min; d <= d_max; d += step) {
    double cost = 0.0;
    int n = 0;
    for (int r = 0; r < rows; ++r) {
      const int du = r - center;
      for (int x = width / 4; x < 3 * width / 4; ++x) {
        // a point at x in the center row appears at x + d*du in row r
        double sx = x + d * du;
        if (sx < 0 || sx > width - 1) continue;
        float v = core::bilinear_sample_plane(epi.plane(0), rows, width,
                                              static_cast<float>(sx),
                                              static_cast<float>(r));
        double diff = v - epi.at(0, center, x);
        cost += diff * diff;
        ++n;
      }
    }
    cost /= std::max(n, 1);
    if (cost < best_cost) {
      best_cost = cost;
      best_d = d;
    }
  }
  return best_d;
}

/// Focus measure: variance of the 4-neighbor Laplacian over the interior.
inline double variance_of_laplacian(const core::Image& img, int border = 4) {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  for (int c = 0; c < img.channels; ++c)
    for (int y = border; y < img.height - border; ++y)
      for (int x = border; x < img.width - border; ++x) {
        double lap = 4.0 * img.at(c, y, x) - img.at(c, y - 1, x) -
                     img.at(c, y + 1, x) - img.at(c, y, x - 1) - img.at(c, y, x + 1);
        sum += lap;
        sumsq += lap * lap;
        ++n;
      }
  double mean = sum / n;
  return sumsq / n - mean * mean;
}

}  // namespace lfv::test
