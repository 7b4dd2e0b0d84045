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
#include <map>
#include <string>
#include <vector>

#include "lfv/core/common.hpp"
#include "lfv/nn/conv.hpp"
#include "lfv/nn/tensor.hpp"

namespace lfv::nn {

/// Ordered map of named trainable tensors. Every parameter is registered
/// exactly once; the registration order defines the optimizer state layout
/// and the checkpoint layout.
template <class T>
class ParamRegistry {
 public:
  Tensor<T> add(const std::string& name, Tensor<T> t) {
    LFV_CHECK_USAGE(!index_.count(name), "parameter '", name, "' registered twice");
    t.set_requires_grad(true);
    index_[name] = names_.size();
    names_.push_back(name);
    params_.push_back(t);
    return t;
  }

  size_t size() const { return params_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<Tensor<T>>& params() { return params_; }
  const std::vector<Tensor<T>>& params() const { return params_; }

  Tensor<T> get(const std::string& name) const {
    auto it = index_.find(name);
    LFV_CHECK_USAGE(it != index_.end(), "unknown parameter '", name, "'");
    return params_[it->second];
  }
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

 private:
  std::map<std::string, size_t> index_;
  std::vector<std::string> names_;
  std::vector<Tensor<T>> params_;
};

/// Uniform Kaiming-style init: U(-b, b) with b = sqrt(6 / fan_in).
template <class T>
inline Tensor<T> kaiming_uniform(Shape shape, int64_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<T> data(static_cast<size_t>(shape_numel(shape)));
  for (auto& v : data) v = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>::from_data(std::move(shape), std::move(data));
}

/// 2D convolution layer with same-padding 3x3 kernels by default.
template <class T>
struct Conv2dLayer {
  Tensor<T> kernel;  // [Co, Ci, kH, kW]
  Tensor<T> bias;    // [Co]
  int64_t stride = 1;
  int64_t pad = 1;

  Conv2dLayer() = default;

  /// zero_init makes the layer an exact zero map (used for output heads).
  Conv2dLayer(ParamRegistry<T>& reg, const std::string& name, int64_t in_ch,
              int64_t out_ch, int64_t k, int64_t stride_, Rng& rng,
              bool zero_init = false)
      : stride(stride_), pad(k / 2) {
    LFV_CHECK_USAGE(k % 2 == 1, "same-padding conv layers need odd kernels");
    Tensor<T> w = zero_init ? Tensor<T>::zeros({out_ch, in_ch, k, k})
                            : kaiming_uniform<T>({out_ch, in_ch, k, k},
                                                 in_ch * k * k, rng);
    kernel = reg.add(name + ".weight", w);
    bias = reg.add(name + ".bias", Tensor<T>::zeros({out_ch}));
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    return conv2d(x, kernel, bias, stride, pad);
  }
};

/// 3D convolution layer; the depth (angular) axis is never strided and kept
/// at full extent via same padding.
template <class T>
struct Conv3dLayer {
  Tensor<T> kernel;  // [Co, Ci, kD, kH, kW]
  Tensor<T> bias;
  int64_t spatial_stride = 1;
  int64_t spatial_pad = 1;
  int64_t depth_pad = 1;

  Conv3dLayer() = default;

  Conv3dLayer(ParamRegistry<T>& reg, const std::string& name, int64_t in_ch,
              int64_t out_ch, int64_t k, int64_t stride_, Rng& rng,
              bool zero_init = false)
      : spatial_stride(stride_), spatial_pad(k / 2), depth_pad(k / 2) {
    LFV_CHECK_USAGE(k % 2 == 1, "same-padding conv layers need odd kernels");
    Tensor<T> w = zero_init ? Tensor<T>::zeros({out_ch, in_ch, k, k, k})
                            : kaiming_uniform<T>({out_ch, in_ch, k, k, k},
                                                 in_ch * k * k * k, rng);
    kernel = reg.add(name + ".weight", w);
    bias = reg.add(name + ".bias", Tensor<T>::zeros({out_ch}));
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    return conv3d(x, kernel, bias, spatial_stride, spatial_pad, depth_pad);
  }
};

}  // namespace lfv::nn
