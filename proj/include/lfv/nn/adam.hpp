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
#include <vector>

#include "lfv/nn/layers.hpp"
#include "lfv/nn/tensor.hpp"

namespace lfv::nn {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a parameter registry. Parameters can be
/// frozen/unfrozen by name prefix (frozen ones keep their state untouched).
template <class T>
class Adam {
 public:
  Adam(ParamRegistry<T>& registry, AdamConfig cfg = {})
      : registry_(registry), cfg_(cfg) {
    m_.resize(registry.size());
    v_.resize(registry.size());
    frozen_.assign(registry.size(), false);
    for (size_t i = 0; i < registry.size(); ++i) {
      m_[i].assign(registry.params()[i].numel(), T(0));
      v_[i].assign(registry.params()[i].numel(), T(0));
    }
  }

  void set_frozen_prefix(const std::string& prefix, bool frozen) {
    for (size_t i = 0; i < registry_.size(); ++i)
      if (registry_.names()[i].rfind(prefix, 0) == 0) frozen_[i] = frozen;
  }

  int64_t step_count() const { return t_; }

  /// One update from the gradients currently stored on the parameters.
  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < registry_.size(); ++i) {
      if (frozen_[i]) continue;
      auto& p = registry_.params()[i];
      LFV_CHECK_SHAPE(p.grad().size() == p.values().size(), "adam: grad shape mismatch");
      auto& pv = p.values();
      const auto& g = p.grad();
      auto& m = m_[i];
      auto& v = v_[i];
      for (size_t j = 0; j < pv.size(); ++j) {
        const double gj = static_cast<double>(g[j]);
        const double mj = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * gj;
        const double vj = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * gj * gj;
        m[j] = static_cast<T>(mj);
        v[j] = static_cast<T>(vj);
        const double mhat = mj / bc1;
        const double vhat = vj / bc2;
        pv[j] = static_cast<T>(pv[j] - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
      }
    }
  }

 private:
  ParamRegistry<T>& registry_;
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
  std::vector<bool> frozen_;
};

}  // namespace lfv::nn
