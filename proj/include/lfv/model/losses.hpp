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

#include <utility>
#include <vector>

#include "lfv/model/network.hpp"
#include "lfv/nn/ops.hpp"
#include "lfv/nn/warp_ops.hpp"
#include "lfv/warp/warp.hpp"

namespace lfv::model {

// ---------------------------------------------------------------------------
// Mean/variance light field losses
// ---------------------------------------------------------------------------

/// Per-pixel mean over the 81 views of a [81,C,H,W] stack.
template <class T>
inline nn::Tensor<T> mean_image_op(const nn::Tensor<T>& lf) {
  return nn::mean_axis0(lf);
}

/// Per-pixel population variance over the views.
template <class T>
inline nn::Tensor<T> variance_image_op(const nn::Tensor<T>& lf) {
  auto m = nn::mean_axis0(lf);
  auto m2 = nn::mean_axis0(nn::mul(lf, lf));
  return nn::sub(m2, nn::mul(m, m));
}

/// Global (mean-image) and local (variance-image) L1 terms.
template <class T>
struct LfLossTerms {
  nn::Tensor<T> global;
  nn::Tensor<T> local;
};

template <class T>
inline LfLossTerms<T> loss_lf_terms(const nn::Tensor<T>& lf, const nn::Tensor<T>& lf_gt) {
  nn::check_same_shape(lf, lf_gt, "loss_lf");
  LfLossTerms<T> terms;
  terms.global = nn::mean_abs(nn::sub(mean_image_op(lf), mean_image_op(lf_gt)));
  terms.local = nn::mean_abs(nn::sub(variance_image_op(lf), variance_image_op(lf_gt)));
  return terms;
}

/// Weighted combination, the module-level light field loss.
template <class T>
inline nn::Tensor<T> loss_lf(const nn::Tensor<T>& lf, const nn::Tensor<T>& lf_gt,
                             T w_global, T w_local) {
  auto terms = loss_lf_terms(lf, lf_gt);
  return nn::add(nn::scale(terms.global, w_global), nn::scale(terms.local, w_local));
}

/// Plain L1 over all views, pixels, and channels.
template <class T>
inline nn::Tensor<T> loss_occ(const nn::Tensor<T>& lf_final, const nn::Tensor<T>& lf_gt) {
  nn::check_same_shape(lf_final, lf_gt, "loss_occ");
  return nn::mean_abs(nn::sub(lf_final, lf_gt));
}

// ---------------------------------------------------------------------------
// Perceptual loss on the mean image
// ---------------------------------------------------------------------------

/// Fixed three-stage convolutional feature stack standing in for a pretrained
/// perceptual network: seeded once, never trained, shared by every loss
/// evaluation. Stages are stride-2 convs at 16/32/64 channels.
template <class T>
class PerceptualStack {
 public:
  explicit PerceptualStack(int in_channels, uint64_t seed = 0x9E7CEF7ull) {
    Rng rng(hash_combine(seed, static_cast<uint64_t>(in_channels)));
    w1_ = nn::kaiming_uniform<T>({16, in_channels, 3, 3}, in_channels * 9, rng);
    w2_ = nn::kaiming_uniform<T>({32, 16, 3, 3}, 16 * 9, rng);
    w3_ = nn::kaiming_uniform<T>({64, 32, 3, 3}, 32 * 9, rng);
  }

  /// Third-stage feature activation of an image tensor [1,C,H,W].
  nn::Tensor<T> features(const nn::Tensor<T>& img) const {
    auto f1 = nn::leaky_relu(nn::conv2d(img, w1_, nn::Tensor<T>(), 2, 1), T(0.2));
    auto f2 = nn::leaky_relu(nn::conv2d(f1, w2_, nn::Tensor<T>(), 2, 1), T(0.2));
    return nn::leaky_relu(nn::conv2d(f2, w3_, nn::Tensor<T>(), 2, 1), T(0.2));
  }

 private:
  nn::Tensor<T> w1_, w2_, w3_;  // constants, not registered anywhere
};

/// L1 between the frozen feature stacks of the two mean images.
template <class T>
inline nn::Tensor<T> loss_percep(const nn::Tensor<T>& lf_final,
                                 const nn::Tensor<T>& lf_gt,
                                 const PerceptualStack<T>& stack) {
  nn::check_same_shape(lf_final, lf_gt, "loss_percep");
  auto f_pred = stack.features(mean_image_op(lf_final));
  auto f_gt = stack.features(mean_image_op(lf_gt));
  return nn::mean_abs(nn::sub(f_pred, f_gt));
}

// ---------------------------------------------------------------------------
// Masked temporal / photometric losses
// ---------------------------------------------------------------------------

namespace detail {

/// Valid mask of a flow pair as a [1,C,H,W] constant tensor (replicated per
/// channel) plus its pixel count. The mask is a detached gate.
template <class T>
inline std::pair<nn::Tensor<T>, size_t> mask_tensor(const nn::Tensor<T>& flow_fw,
                                                    const nn::Tensor<T>& flow_bw,
                                                    float tol, int64_t channels) {
  core::FlowField fw = tensor_to_flow(flow_fw);
  core::FlowField bw = tensor_to_flow(flow_bw);
  core::ValidMask mask = warp::valid_mask(fw, bw, tol);
  const size_t count = mask.count();
  std::vector<T> data(static_cast<size_t>(channels) * mask.pixels());
  for (int64_t c = 0; c < channels; ++c)
    for (size_t i = 0; i < mask.pixels(); ++i)
      data[static_cast<size_t>(c) * mask.pixels() + i] = static_cast<T>(mask.m[i]);
  auto t = nn::Tensor<T>::from_data({1, channels, mask.height, mask.width},
                                    std::move(data));
  return {t, count};
}

/// Masked L1 between warp(src, flow) and target, averaged over valid pixels.
template <class T>
inline nn::Tensor<T> masked_warp_l1(const nn::Tensor<T>& src,
                                    const nn::Tensor<T>& target,
                                    const nn::Tensor<T>& flow,
                                    const nn::Tensor<T>& mask, size_t count) {
  auto diff = nn::sub(nn::warp_bilinear(src, flow), target);
  auto masked = nn::mul(diff, mask);
  const T inv = T(1) / static_cast<T>(count * static_cast<size_t>(src.dim(1)));
  return nn::scale(nn::sum(nn::abs_op(masked)), inv);
}

}  // namespace detail

template <class T>
struct TemporalLoss {
  nn::Tensor<T> value;
  int dropped_terms = 0;  // directions skipped because their mask was empty
};

/// Two-direction masked temporal consistency: mean images of consecutive
/// synthesized frames warped across time and compared under forward-backward
/// valid masks. A direction with an empty mask is dropped with a warning
/// counter rather than poisoning the loss.
template <class T>
inline TemporalLoss<T> loss_temp(const nn::Tensor<T>& lf_t, const nn::Tensor<T>& lf_prev,
                                 const nn::Tensor<T>& flow_fw,
                                 const nn::Tensor<T>& flow_bw, float tol) {
  nn::check_same_shape(lf_t, lf_prev, "loss_temp");
  auto mean_t = mean_image_op(lf_t);
  auto mean_prev = mean_image_op(lf_prev);
  const int64_t c = mean_t.dim(1);

  TemporalLoss<T> out;
  out.value = nn::Tensor<T>::scalar(T(0));
  auto [mask_fw, count_fw] = detail::mask_tensor(flow_fw, flow_bw, tol, c);
  auto [mask_bw, count_bw] = detail::mask_tensor(flow_bw, flow_fw, tol, c);
  if (count_fw > 0)
    out.value = nn::add(out.value, detail::masked_warp_l1(mean_t, mean_prev, flow_fw,
                                                          mask_fw, count_fw));
  else
    ++out.dropped_terms;
  if (count_bw > 0)
    out.value = nn::add(out.value, detail::masked_warp_l1(mean_prev, mean_t, flow_bw,
                                                          mask_bw, count_bw));
  else
    ++out.dropped_terms;
  return out;
}

/// First-order smoothness of a flow field: mean |forward difference| along
/// both spatial axes.
template <class T>
inline nn::Tensor<T> flow_smoothness(const nn::Tensor<T>& flow) {
  const int64_t h = flow.dim(2), w = flow.dim(3);
  auto dx = nn::sub(nn::narrow_axis(flow, 3, 1, w - 1), nn::narrow_axis(flow, 3, 0, w - 1));
  auto dy = nn::sub(nn::narrow_axis(flow, 2, 1, h - 1), nn::narrow_axis(flow, 2, 0, h - 1));
  return nn::add(nn::mean_abs(dx), nn::mean_abs(dy));
}

/// Unsupervised flow loss: occlusion-masked photometric L1 in both directions
/// plus weighted first-order smoothness.
template <class T>
inline nn::Tensor<T> loss_flow(const nn::Tensor<T>& frame_t,
                               const nn::Tensor<T>& frame_prev,
                               const nn::Tensor<T>& flow_fw,
                               const nn::Tensor<T>& flow_bw, float tol,
                               float smoothness_weight) {
  nn::check_same_shape(frame_t, frame_prev, "loss_flow");
  const int64_t c = frame_t.dim(1);
  auto loss = nn::Tensor<T>::scalar(T(0));
  auto [mask_fw, count_fw] = detail::mask_tensor(flow_fw, flow_bw, tol, c);
  auto [mask_bw, count_bw] = detail::mask_tensor(flow_bw, flow_fw, tol, c);
  if (count_fw > 0)
    loss = nn::add(loss, detail::masked_warp_l1(frame_t, frame_prev, flow_fw, mask_fw,
                                                count_fw));
  if (count_bw > 0)
    loss = nn::add(loss, detail::masked_warp_l1(frame_prev, frame_t, flow_bw, mask_bw,
                                                count_bw));
  auto smooth = nn::add(flow_smoothness(flow_fw), flow_smoothness(flow_bw));
  return nn::add(loss, nn::scale(smooth, static_cast<T>(smoothness_weight)));
}

// ---------------------------------------------------------------------------
// LightFieldFrame conveniences (tests / evaluation)
// ---------------------------------------------------------------------------

template <class T = float>
inline double loss_lf_value(const LightFieldFrame& lf, const LightFieldFrame& gt,
                            float w_global, float w_local) {
  nn::NoGradGuard ng;
  return static_cast<double>(loss_lf(lightfield_to_tensor<T>(lf),
                                     lightfield_to_tensor<T>(gt),
                                     static_cast<T>(w_global), static_cast<T>(w_local))
                                 .item());
}

template <class T = float>
inline double loss_occ_value(const LightFieldFrame& lf, const LightFieldFrame& gt) {
  nn::NoGradGuard ng;
  return static_cast<double>(
      loss_occ(lightfield_to_tensor<T>(lf), lightfield_to_tensor<T>(gt)).item());
}

}  // namespace lfv::model
