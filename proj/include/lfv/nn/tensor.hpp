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
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "lfv/core/common.hpp"

namespace lfv::nn {

using Shape = std::vector<int64_t>;

inline int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string r = "[";
  for (size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + std::to_string(s[i]);
  return r + "]";
}

/// When true (the default), every operation validates that its output is
/// finite and throws NumericError otherwise.
inline bool& finite_checks() {
  static bool enabled = true;
  return enabled;
}

/// When false, newly built ops record no tape state (inference mode).
inline bool& grad_enabled() {
  static bool enabled = true;
  return enabled;
}

struct NoGradGuard {
  bool saved;
  NoGradGuard() : saved(grad_enabled()) { grad_enabled() = false; }
  ~NoGradGuard() { grad_enabled() = saved; }
};

/// N-dimensional array with optional reverse-mode gradient tracking.
/// Value semantics with a shared payload: copies alias the same storage,
/// which is what the tape needs.
template <class T>
class Tensor {
 public:
  struct Impl {
    Shape shape;
    std::vector<T> v;                       // values
    std::vector<T> g;                       // gradient, sized lazily
    bool requires_grad = false;             // leaf parameter / tracked input
    bool tracked = false;                   // participates in the tape
    std::vector<std::shared_ptr<Impl>> parents;
    std::function<void(Impl&)> backprop;    // reads own g, accumulates parents' g

    void ensure_grad() {
      if (g.size() != v.size()) g.assign(v.size(), T(0));
    }
  };

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Impl> p) : p_(std::move(p)) {}

  static Tensor zeros(Shape shape) { return full(std::move(shape), T(0)); }

  static Tensor full(Shape shape, T value) {
    auto p = std::make_shared<Impl>();
    p->v.assign(static_cast<size_t>(shape_numel(shape)), value);
    p->shape = std::move(shape);
    return Tensor(std::move(p));
  }

  static Tensor from_data(Shape shape, std::vector<T> data) {
    LFV_CHECK_SHAPE(static_cast<int64_t>(data.size()) == shape_numel(shape),
                    "tensor data size ", data.size(), " does not match shape ",
                    shape_str(shape));
    auto p = std::make_shared<Impl>();
    p->shape = std::move(shape);
    p->v = std::move(data);
    return Tensor(std::move(p));
  }

  static Tensor scalar(T value) { return full({1}, value); }

  bool defined() const { return p_ != nullptr; }
  const Shape& shape() const { return p_->shape; }
  int64_t numel() const { return static_cast<int64_t>(p_->v.size()); }
  int64_t dim(int i) const { return p_->shape[i]; }
  int ndim() const { return static_cast<int>(p_->shape.size()); }

  std::vector<T>& values() { return p_->v; }
  const std::vector<T>& values() const { return p_->v; }
  std::vector<T>& grad() {
    p_->ensure_grad();
    return p_->g;
  }
  const std::vector<T>& grad() const {
    p_->ensure_grad();
    return p_->g;
  }

  T item() const {
    LFV_CHECK_USAGE(numel() == 1, "item() requires a single-element tensor, shape is ",
                    shape_str(p_->shape));
    return p_->v[0];
  }

  bool requires_grad() const { return p_->requires_grad; }
  bool tracked() const { return p_->tracked; }

  Tensor& set_requires_grad(bool on = true) {
    LFV_CHECK_USAGE(!p_->backprop, "requires_grad can only be set on leaf tensors");
    p_->requires_grad = on;
    p_->tracked = on;
    return *this;
  }

  void zero_grad() {
    p_->g.assign(p_->v.size(), T(0));
  }

  /// Detached copy of the values: a fresh constant leaf, outside the tape.
  Tensor detach() const {
    auto p = std::make_shared<Impl>();
    p->shape = p_->shape;
    p->v = p_->v;
    return Tensor(std::move(p));
  }

  std::shared_ptr<Impl> impl() const { return p_; }

 private:
  std::shared_ptr<Impl> p_;
};

namespace detail {

template <class T>
inline void check_finite(const std::vector<T>& v, const char* op) {
  if (!finite_checks()) return;
  for (T x : v)
    if (!std::isfinite(static_cast<double>(x)))
      throw NumericError(std::string("non-finite value produced by ") + op);
}

/// Builds an op node. The backprop closure runs only when at least one input
/// is tracked; untracked subgraphs carry no tape state at all.
template <class T>
inline Tensor<T> make_op(Shape shape, std::vector<T> values,
                         std::vector<Tensor<T>> inputs,
                         std::function<void(typename Tensor<T>::Impl&)> backprop,
                         const char* name) {
  check_finite(values, name);
  auto out = Tensor<T>::from_data(std::move(shape), std::move(values));
  bool tracked = false;
  if (grad_enabled())
    for (const auto& in : inputs) tracked = tracked || in.tracked();
  if (tracked) {
    auto impl = out.impl();
    impl->tracked = true;
    impl->parents.reserve(inputs.size());
    for (const auto& in : inputs) impl->parents.push_back(in.impl());
    impl->backprop = std::move(backprop);
  }
  return out;
}

}  // namespace detail

/// Reverse-mode sweep from a scalar root: accumulates d(root)/d(leaf) into
/// every tracked tensor's grad. Deterministic for identical graphs.
template <class T>
inline void backward(const Tensor<T>& root) {
  LFV_CHECK_USAGE(root.numel() == 1, "backward() requires a scalar root");
  if (!root.tracked()) return;

  using Impl = typename Tensor<T>::Impl;
  // Iterative post-order DFS to get a topological order over tracked nodes.
  std::vector<Impl*> topo;
  std::unordered_set<Impl*> seen;
  std::vector<std::pair<Impl*, size_t>> stack;
  stack.emplace_back(root.impl().get(), 0);
  seen.insert(root.impl().get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Impl* next = node->parents[idx++].get();
      if (next->tracked && !seen.count(next)) {
        seen.insert(next);
        stack.emplace_back(next, 0);
      }
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  for (Impl* node : topo) node->ensure_grad();
  root.impl()->g[0] += T(1);

  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Impl* node = *it;
    if (node->backprop) {
      for (auto& parent : node->parents)
        if (parent->tracked) parent->ensure_grad();
      node->backprop(*node);
    }
  }
}

}  // namespace lfv::nn
