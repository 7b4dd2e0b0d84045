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

#include <string>
#include <utility>
#include <vector>

#include "lfv/core/image.hpp"
#include "lfv/core/lightfield_ops.hpp"
#include "lfv/model/config.hpp"
#include "lfv/nn/adam.hpp"
#include "lfv/nn/correlation.hpp"
#include "lfv/nn/layers.hpp"
#include "lfv/nn/ops.hpp"
#include "lfv/nn/warp_ops.hpp"

namespace lfv::model {

using core::AngularCoord;
using core::Image;
using core::LightFieldFrame;

// ---------------------------------------------------------------------------
// Image <-> tensor conversion
// ---------------------------------------------------------------------------

template <class T>
inline nn::Tensor<T> image_to_tensor(const Image& img) {
  std::vector<T> data(img.data.size());
  for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<T>(img.data[i]);
  return nn::Tensor<T>::from_data({1, img.channels, img.height, img.width},
                                  std::move(data));
}

template <class T>
inline Image tensor_to_image(const nn::Tensor<T>& t) {
  LFV_CHECK_SHAPE(t.ndim() == 4 && t.dim(0) == 1, "tensor_to_image expects [1,C,H,W]");
  Image img(static_cast<int>(t.dim(2)), static_cast<int>(t.dim(3)),
            static_cast<int>(t.dim(1)));
  for (size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<float>(t.values()[i]);
  return img;
}

/// [81, C, H, W] stack of all sub-aperture images, raster view order.
template <class T>
inline nn::Tensor<T> lightfield_to_tensor(const LightFieldFrame& lf) {
  lf.validate();
  const int c = lf.channels(), h = lf.height(), w = lf.width();
  std::vector<T> data(static_cast<size_t>(core::kNumViews) * c * h * w);
  size_t off = 0;
  for (const auto& s : lf.sais)
    for (float v : s.data) data[off++] = static_cast<T>(v);
  return nn::Tensor<T>::from_data({core::kNumViews, c, h, w}, std::move(data));
}

template <class T>
inline LightFieldFrame tensor_to_lightfield(const nn::Tensor<T>& t, int timestamp = 0) {
  LFV_CHECK_SHAPE(t.ndim() == 4 && t.dim(0) == core::kNumViews,
                  "tensor_to_lightfield expects [81,C,H,W]");
  LightFieldFrame lf(static_cast<int>(t.dim(2)), static_cast<int>(t.dim(3)),
                     static_cast<int>(t.dim(1)), timestamp);
  const size_t per_view = static_cast<size_t>(t.dim(1)) * t.dim(2) * t.dim(3);
  for (int i = 0; i < core::kNumViews; ++i)
    for (size_t j = 0; j < per_view; ++j)
      lf.sais[i].data[j] = static_cast<float>(t.values()[i * per_view + j]);
  return lf;
}

template <class T>
inline nn::Tensor<T> flow_to_tensor(const core::FlowField& f) {
  std::vector<T> data(f.pixels() * 2);
  for (size_t i = 0; i < f.pixels(); ++i) data[i] = static_cast<T>(f.dx[i]);
  for (size_t i = 0; i < f.pixels(); ++i)
    data[f.pixels() + i] = static_cast<T>(f.dy[i]);
  return nn::Tensor<T>::from_data({1, 2, f.height, f.width}, std::move(data));
}

template <class T>
inline core::FlowField tensor_to_flow(const nn::Tensor<T>& t) {
  LFV_CHECK_SHAPE(t.ndim() == 4 && t.dim(0) == 1 && t.dim(1) == 2,
                  "tensor_to_flow expects [1,2,H,W]");
  core::FlowField f(static_cast<int>(t.dim(2)), static_cast<int>(t.dim(3)));
  for (size_t i = 0; i < f.pixels(); ++i) {
    f.dx[i] = static_cast<float>(t.values()[i]);
    f.dy[i] = static_cast<float>(t.values()[f.pixels() + i]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

template <class T>
struct FeatureMaps {
  nn::Tensor<T> zeta;       // final features, [1, 8bc, H/4, W/4]
  nn::Tensor<T> skip_full;  // first encoder activation, [1, bc, H, W]
  nn::Tensor<T> skip_half;  // third encoder activation, [1, 4bc, H/2, W/2]
};

template <class T>
struct SynthesisOutput {
  nn::Tensor<T> lf_initial;  // [81, C, H, W]
  nn::Tensor<T> lf_final;    // [81, C, H, W]
  nn::Tensor<T> residual;    // [81, C, H, W], in [-1, 1]
  nn::Tensor<T> app_flows;   // [81, 2, H, W], |flow| <= flow_cap
  std::vector<Image> variance_masks;  // 81 binary masks (outside the tape)
  nn::Tensor<T> flow_fw;     // O_{t -> t-1}, [1, 2, H, W], on frame t-1's grid
  nn::Tensor<T> flow_bw;     // O_{t-1 -> t}, on frame t's grid
};

/// The synthesis network: initial + final feature encoders with a correlation
/// layer, an appearance-flow decoder, a 3D occlusion refinement network, and
/// a shared optical-flow decoder.
template <class T>
class Network {
 public:
  explicit Network(const NetworkConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(hash_combine(cfg_.seed, 0xA11CEull));
    const int bc = cfg_.base_channels;
    const int corr_ch = corr_channels();
    const int c = cfg_.input_channels;

    enc1_ = {reg_, "enc1", 1, bc, 3, 1, rng};
    enc2_ = {reg_, "enc2", bc, 2 * bc, 3, 2, rng};
    enc3_ = {reg_, "enc3", 2 * bc, 4 * bc, 3, 1, rng};
    enc4_ = {reg_, "enc4", 4 * bc, 4 * bc, 3, 2, rng};
    conv_mix_ = {reg_, "conv_mix", 4 * bc, 4 * bc, 3, 1, rng};
    fin1_ = {reg_, "fin1", corr_ch + 4 * bc, 8 * bc, 3, 1, rng};
    fin2_ = {reg_, "fin2", 8 * bc, 8 * bc, 3, 1, rng};

    app_dec1_ = {reg_, "app_dec1", 8 * bc + 4 * bc, 4 * bc, 3, 1, rng};
    app_dec2_ = {reg_, "app_dec2", 4 * bc + bc, 2 * bc, 3, 1, rng};
    app_head_ = {reg_, "app_head", 2 * bc, 2 * core::kNumViews, 1, 1, rng,
                 /*zero_init=*/true};

    flow_reduce_ = {reg_, "flow_reduce", 16 * bc, 8 * bc, 1, 1, rng};
    flow_dec1_ = {reg_, "flow_dec1", 8 * bc + 4 * bc, 4 * bc, 3, 1, rng};
    flow_dec2_ = {reg_, "flow_dec2", 4 * bc + bc, 2 * bc, 3, 1, rng};
    flow_head_ = {reg_, "flow_head", 2 * bc, 2, 1, 1, rng, /*zero_init=*/true};

    occ_e1_ = {reg_, "occ.e1", c + 1, bc / 2, 3, 2, rng};
    occ_e2_ = {reg_, "occ.e2", bc / 2, bc, 3, 2, rng};
    occ_e3_ = {reg_, "occ.e3", bc, 2 * bc, 3, 2, rng};
    occ_d1_ = {reg_, "occ.d1", 2 * bc, bc, 3, 1, rng};
    occ_d2_ = {reg_, "occ.d2", bc, bc / 2, 3, 1, rng};
    occ_d3_ = {reg_, "occ.d3", bc / 2, bc / 2, 3, 1, rng};
    occ_head_ = {reg_, "occ.head", bc / 2, c, 1, 1, rng, /*zero_init=*/true};
  }

  const NetworkConfig& config() const { return cfg_; }
  nn::ParamRegistry<T>& registry() { return reg_; }
  const nn::ParamRegistry<T>& registry() const { return reg_; }
  int corr_channels() const {
    int side = 2 * cfg_.correlation_max_disp + 1;
    return side * side;
  }

  /// Initial encoder: four conv layers; returns the final activation plus
  /// the two skip activations used by the decoders.
  FeatureMaps<T> encode_initial(const nn::Tensor<T>& luma) const {
    LFV_CHECK_SHAPE(luma.dim(1) == 1, "encoder expects luminance input");
    LFV_CHECK_SHAPE(luma.dim(2) % 4 == 0 && luma.dim(3) % 4 == 0,
                    "encoder input extents must be divisible by 4");
    FeatureMaps<T> f;
    auto x1 = nn::leaky_relu(enc1_.forward(luma), T(0.2));
    auto x2 = nn::leaky_relu(enc2_.forward(x1), T(0.2));
    auto x3 = nn::leaky_relu(enc3_.forward(x2), T(0.2));
    auto x4 = nn::leaky_relu(enc4_.forward(x3), T(0.2));
    f.skip_full = x1;
    f.skip_half = x3;
    f.zeta = x4;  // placeholder until the correlation stage runs
    return f;
  }

  /// Correlation between two initial features (or zeros when bypassed).
  nn::Tensor<T> correlate(const nn::Tensor<T>& xi_a, const nn::Tensor<T>& xi_b) const {
    if (cfg_.correlation_bypass)
      return nn::Tensor<T>::zeros(
          {xi_a.dim(0), corr_channels(), xi_a.dim(2), xi_a.dim(3)});
    return nn::correlation(xi_a, xi_b, cfg_.correlation_max_disp);
  }

  /// Final encoder over correlation output and mixed initial features.
  nn::Tensor<T> encode_final(const nn::Tensor<T>& corr,
                             const nn::Tensor<T>& xi) const {
    auto mixed = nn::leaky_relu(conv_mix_.forward(xi), T(0.2));
    auto cat = nn::concat<T>({corr, mixed}, 1);
    auto y1 = nn::leaky_relu(fin1_.forward(cat), T(0.2));
    return nn::leaky_relu(fin2_.forward(y1), T(0.2));
  }

  /// Full feature extraction for a frame pair. The correlation order is
  /// transposed between the two outputs.
  std::pair<FeatureMaps<T>, FeatureMaps<T>> feature_extract(
      const nn::Tensor<T>& luma_t, const nn::Tensor<T>& luma_prev) const {
    nn::check_same_shape(luma_t, luma_prev, "feature_extract");
    FeatureMaps<T> ft = encode_initial(luma_t);
    FeatureMaps<T> fp = encode_initial(luma_prev);
    auto xi_t = ft.zeta;
    auto xi_p = fp.zeta;
    ft.zeta = encode_final(correlate(xi_t, xi_p), xi_t);
    fp.zeta = encode_final(correlate(xi_p, xi_t), xi_p);
    return {ft, fp};
  }

  /// Appearance-flow decoder: 81 per-view flow fields, tanh-capped, with the
  /// center view pinned to zero. Output [81, 2, H, W].
  nn::Tensor<T> appearance_flow_decode(const FeatureMaps<T>& f) const {
    auto x = nn::upsample2x_spatial(f.zeta);
    x = nn::leaky_relu(app_dec1_.forward(nn::concat<T>({x, f.skip_half}, 1)), T(0.2));
    x = nn::upsample2x_spatial(x);
    x = nn::leaky_relu(app_dec2_.forward(nn::concat<T>({x, f.skip_full}, 1)), T(0.2));
    auto raw = app_head_.forward(x);  // [1, 162, H, W]
    auto capped = nn::scale(nn::tanh_op(raw), static_cast<T>(cfg_.flow_cap));
    auto flows = nn::reshape(capped, {core::kNumViews, 2, capped.dim(2), capped.dim(3)});
    return nn::mul(flows, center_zero_mask(capped.dim(2), capped.dim(3)));
  }

  /// Initial synthesis: every view is the input shifted by eta*(u,v) and then
  /// warped by its appearance flow; the center view is the input itself.
  nn::Tensor<T> synth_initial(const nn::Tensor<T>& input,
                              const nn::Tensor<T>& flows) const {
    LFV_CHECK_SHAPE(flows.dim(0) == core::kNumViews && flows.dim(1) == 2,
                    "synth_initial expects [81,2,H,W] flows");
    const int64_t h = input.dim(2), w = input.dim(3);
    LFV_CHECK_DOMAIN(std::abs(cfg_.eta) * core::kAngularRadius <
                         static_cast<float>(std::min(h, w)) / 2.0f,
                     "eta too large for the input size");
    std::vector<nn::Tensor<T>> views;
    views.reserve(core::kNumViews);
    for (int i = 0; i < core::kNumViews; ++i) {
      AngularCoord a = core::view_coord(i);
      if (a.u == 0 && a.v == 0) {
        views.push_back(input);
        continue;
      }
      auto shifted = nn::warp_bilinear(input, shift_flow(a, h, w));
      views.push_back(nn::warp_bilinear(shifted, nn::slice0(flows, i)));
    }
    return nn::concat(views, 0);
  }

  /// Variance masks of the initial light field, detached from the tape.
  std::vector<Image> variance_masks(const nn::Tensor<T>& lf_hat) const {
    LightFieldFrame lf = tensor_to_lightfield(lf_hat);
    Image var = core::variance_image(core::to_luminance(lf));
    core::VarianceMaskPolicy policy;
    policy.percentile = cfg_.variance_mask_percentile;
    policy.eta = cfg_.eta;
    return core::variance_mask(var, policy);
  }

  /// 3D occlusion network: residual refinement of the initial light field.
  /// The angular axis (81 = 9x9 views) is preserved at every stage.
  std::pair<nn::Tensor<T>, nn::Tensor<T>> occlusion_refine(
      const nn::Tensor<T>& lf_hat, const std::vector<Image>& masks,
      const nn::Tensor<T>& input) const {
    const int64_t c = lf_hat.dim(1), h = lf_hat.dim(2), w = lf_hat.dim(3);
    LFV_CHECK_SHAPE(h % 8 == 0 && w % 8 == 0,
                    "occlusion network needs extents divisible by 8");
    LFV_CHECK_SHAPE(masks.size() == core::kNumViews, "need 81 variance masks");

    std::vector<T> mdata(static_cast<size_t>(core::kNumViews) * h * w);
    size_t off = 0;
    for (const auto& m : masks)
      for (float v : m.data) mdata[off++] = static_cast<T>(v);
    auto mask =
        nn::Tensor<T>::from_data({core::kNumViews, 1, h, w}, std::move(mdata));

    auto x = nn::concat<T>({lf_hat, mask}, 1);                    // [81, C+1, H, W]
    auto vol = nn::reshape(nn::permute(x, {1, 0, 2, 3}),
                           {1, c + 1, core::kNumViews, h, w});    // [1, C+1, 81, H, W]
    auto e1 = nn::leaky_relu(occ_e1_.forward(vol), T(0.2));
    auto e2 = nn::leaky_relu(occ_e2_.forward(e1), T(0.2));
    auto e3 = nn::leaky_relu(occ_e3_.forward(e2), T(0.2));
    auto d1 = nn::upsample2x_spatial(nn::leaky_relu(occ_d1_.forward(e3), T(0.2)));
    auto d2 = nn::upsample2x_spatial(nn::leaky_relu(occ_d2_.forward(d1), T(0.2)));
    auto d3 = nn::upsample2x_spatial(nn::leaky_relu(occ_d3_.forward(d2), T(0.2)));
    auto res_vol = nn::tanh_op(occ_head_.forward(d3));            // [1, C, 81, H, W]
    auto residual = nn::permute(nn::reshape(res_vol, {c, core::kNumViews, h, w}),
                                {1, 0, 2, 3});                    // [81, C, H, W]

    auto refined = nn::clamp_op(nn::add(lf_hat, residual), T(0), T(1));
    // Re-pin the center view to the input frame.
    std::vector<nn::Tensor<T>> views;
    views.reserve(core::kNumViews);
    const int center = core::view_index({0, 0});
    for (int i = 0; i < core::kNumViews; ++i)
      views.push_back(i == center ? input : nn::slice0(refined, i));
    return {nn::concat(views, 0), residual};
  }

  /// Optical flow between two feature sets. The skip connections come from
  /// the frame whose pixel grid the flow lives on (the warp target).
  nn::Tensor<T> optical_flow_decode(const nn::Tensor<T>& zeta_src,
                                    const nn::Tensor<T>& zeta_dst,
                                    const FeatureMaps<T>& grid_frame) const {
    auto x = nn::leaky_relu(
        flow_reduce_.forward(nn::concat<T>({zeta_src, zeta_dst}, 1)), T(0.2));
    x = nn::upsample2x_spatial(x);
    x = nn::leaky_relu(flow_dec1_.forward(nn::concat<T>({x, grid_frame.skip_half}, 1)),
                       T(0.2));
    x = nn::upsample2x_spatial(x);
    x = nn::leaky_relu(flow_dec2_.forward(nn::concat<T>({x, grid_frame.skip_full}, 1)),
                       T(0.2));
    return flow_head_.forward(x);  // [1, 2, H, W]
  }

  /// Whole pipeline for one frame pair.
  SynthesisOutput<T> synthesize_frame(const Image& frame_t,
                                      const Image& frame_prev) const {
    LFV_CHECK_SHAPE(frame_t.same_shape(frame_prev),
                    "synthesize_frame: frame shapes differ");
    LFV_CHECK_SHAPE(frame_t.channels == cfg_.input_channels,
                    "synthesize_frame: expected ", cfg_.input_channels,
                    "-channel frames");
    auto input_t = image_to_tensor<T>(frame_t);
    auto luma_t = image_to_tensor<T>(core::to_luminance(frame_t));
    auto luma_prev = image_to_tensor<T>(core::to_luminance(frame_prev));

    SynthesisOutput<T> out;
    auto [ft, fp] = feature_extract(luma_t, luma_prev);
    out.app_flows = appearance_flow_decode(ft);
    out.lf_initial = synth_initial(input_t, out.app_flows);
    out.variance_masks = variance_masks(out.lf_initial);
    auto [lf_final, residual] =
        occlusion_refine(out.lf_initial, out.variance_masks, input_t);
    out.lf_final = lf_final;
    out.residual = residual;
    out.flow_fw = optical_flow_decode(ft.zeta, fp.zeta, fp);
    out.flow_bw = optical_flow_decode(fp.zeta, ft.zeta, ft);
    return out;
  }

  /// Constant flow tensor realizing the eta-shift toward view (u, v).
  nn::Tensor<T> shift_flow(AngularCoord a, int64_t h, int64_t w) const {
    auto f = nn::Tensor<T>::zeros({1, 2, h, w});
    const T dx = static_cast<T>(-cfg_.eta * a.u);
    const T dy = static_cast<T>(-cfg_.eta * a.v);
    auto& v = f.values();
    const size_t plane = static_cast<size_t>(h) * w;
    std::fill(v.begin(), v.begin() + plane, dx);
    std::fill(v.begin() + plane, v.end(), dy);
    return f;
  }

 private:
  nn::Tensor<T> center_zero_mask(int64_t h, int64_t w) const {
    auto m = nn::Tensor<T>::full({core::kNumViews, 2, h, w}, T(1));
    const size_t per_view = static_cast<size_t>(2) * h * w;
    const size_t start = core::view_index({0, 0}) * per_view;
    std::fill(m.values().begin() + start, m.values().begin() + start + per_view, T(0));
    return m;
  }

  NetworkConfig cfg_;
  nn::ParamRegistry<T> reg_;
  nn::Conv2dLayer<T> enc1_, enc2_, enc3_, enc4_;
  nn::Conv2dLayer<T> conv_mix_, fin1_, fin2_;
  nn::Conv2dLayer<T> app_dec1_, app_dec2_, app_head_;
  nn::Conv2dLayer<T> flow_reduce_, flow_dec1_, flow_dec2_, flow_head_;
  nn::Conv3dLayer<T> occ_e1_, occ_e2_, occ_e3_, occ_d1_, occ_d2_, occ_d3_, occ_head_;
};

}  // namespace lfv::model
