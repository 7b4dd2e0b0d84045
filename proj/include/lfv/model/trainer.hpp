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

#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lfv/model/losses.hpp"
#include "lfv/model/network.hpp"
#include "lfv/nn/adam.hpp"

namespace lfv::model {

struct TrainLogRow {
  int iteration = 0;
  int phase = 1;
  double l_global = 0, l_local = 0, l_flow = 0;
  double l_occ = 0, l_percep = 0, l_temp = 0;
  double total = 0;
};

inline std::string train_log_header() {
  return "iteration,phase,l_global,l_local,l_flow,l_occ,l_percep,l_temp,total";
}

inline std::string format_log_row(const TrainLogRow& r) {
  std::ostringstream os;
  os << r.iteration << "," << r.phase << "," << r.l_global << "," << r.l_local << ","
     << r.l_flow << "," << r.l_occ << "," << r.l_percep << "," << r.l_temp << ","
     << r.total;
  return os.str();
}

/// Two-phase unsupervised training driver. Phase 1 (the warmup) trains the
/// flow and appearance decoders on the mean/variance and photometric flow
/// losses with the occlusion network frozen; phase 2 adds the occlusion,
/// perceptual, and temporal terms. Fully deterministic for a fixed seed.
template <class T = float>
class Trainer {
 public:
  Trainer(std::vector<core::LightFieldVideo> videos, const NetworkConfig& cfg)
      : cfg_(cfg),
        videos_(std::move(videos)),
        net_(std::make_unique<Network<T>>(cfg)),
        percep_(cfg.input_channels),
        rng_(hash_combine(cfg.seed, 0x7247ull)) {
    cfg_.validate();
    LFV_CHECK_DOMAIN(!videos_.empty(), "training dataset is empty");
    for (const auto& v : videos_) {
      v.validate();
      LFV_CHECK_DOMAIN(v.frames.size() >= 2, "training videos need >= 2 frames");
      LFV_CHECK_SHAPE(v.frames[0].channels() == cfg_.input_channels,
                      "dataset channel count does not match the config");
      LFV_CHECK_DOMAIN(v.frames[0].height() >= cfg_.crop &&
                           v.frames[0].width() >= cfg_.crop,
                       "crop larger than the training frames");
    }
    nn::AdamConfig ac;
    ac.lr = cfg_.learning_rate;
    ac.beta1 = cfg_.adam_beta1;
    ac.beta2 = cfg_.adam_beta2;
    adam_ = std::make_unique<nn::Adam<T>>(net_->registry(), ac);
    adam_->set_frozen_prefix("occ.", true);
  }

  Network<T>& network() { return *net_; }
  const std::vector<TrainLogRow>& log() const { return log_; }
  int temporal_warnings() const { return temp_warnings_; }

  /// Runs the full schedule. The callback (when set) sees every log row as it
  /// is produced.
  void run(const std::function<void(const TrainLogRow&)>& on_row = nullptr) {
    for (int it = 0; it < cfg_.total_iters; ++it) {
      TrainLogRow row = step(it);
      log_.push_back(row);
      if (on_row) on_row(row);
    }
  }

  /// One optimization step; exposed for fine-grained tests.
  TrainLogRow step(int it) {
    const int phase = it < cfg_.warmup_iters ? 1 : 2;
    if (phase == 2 && frozen_) {
      adam_->set_frozen_prefix("occ.", false);
      frozen_ = false;
    }

    // Deterministic sample: video, frame pair, crop window.
    const auto& video = videos_[rng_.uniform_int(0, videos_.size() - 1)];
    const int t = static_cast<int>(rng_.uniform_int(1, video.frames.size() - 1));
    const int max_x = video.frames[0].width() - cfg_.crop;
    const int max_y = video.frames[0].height() - cfg_.crop;
    const int x0 = static_cast<int>(rng_.uniform_int(0, max_x));
    const int y0 = static_cast<int>(rng_.uniform_int(0, max_y));

    core::LightFieldFrame gt_t =
        core::crop_frame(video.frames[t], x0, y0, cfg_.crop, cfg_.crop);
    core::LightFieldFrame gt_prev =
        core::crop_frame(video.frames[t - 1], x0, y0, cfg_.crop, cfg_.crop);

    auto gt_t_tensor = lightfield_to_tensor<T>(gt_t);
    auto input_t = image_to_tensor<T>(gt_t.center());
    auto input_prev = image_to_tensor<T>(gt_prev.center());
    auto luma_t = image_to_tensor<T>(core::to_luminance(gt_t.center()));
    auto luma_prev = image_to_tensor<T>(core::to_luminance(gt_prev.center()));

    net_->registry().zero_grads();

    auto [ft, fp] = net_->feature_extract(luma_t, luma_prev);
    auto app_flows_t = net_->appearance_flow_decode(ft);
    auto lf_hat_t = net_->synth_initial(input_t, app_flows_t);

    auto lf_terms = loss_lf_terms(lf_hat_t, gt_t_tensor);
    auto flow_fw = net_->optical_flow_decode(ft.zeta, fp.zeta, fp);
    auto flow_bw = net_->optical_flow_decode(fp.zeta, ft.zeta, ft);
    auto l_flow = loss_flow(luma_t, luma_prev, flow_fw, flow_bw, cfg_.valid_mask_tol,
                            cfg_.flow_smoothness);

    auto total = nn::add(
        nn::add(nn::scale(lf_terms.global, static_cast<T>(cfg_.w_global)),
                nn::scale(lf_terms.local, static_cast<T>(cfg_.w_local))),
        nn::scale(l_flow, static_cast<T>(cfg_.w_flow)));

    TrainLogRow row;
    row.iteration = it;
    row.phase = phase;
    row.l_global = static_cast<double>(lf_terms.global.item());
    row.l_local = static_cast<double>(lf_terms.local.item());
    row.l_flow = static_cast<double>(l_flow.item());

    if (phase == 2) {
      auto masks = net_->variance_masks(lf_hat_t);
      auto [lf_final, residual] = net_->occlusion_refine(lf_hat_t, masks, input_t);
      auto l_occ = loss_occ(lf_final, gt_t_tensor);
      auto l_percep = loss_percep(lf_final, gt_t_tensor, percep_);

      if (cfg_.w_temp > 0) {
        auto app_flows_prev = net_->appearance_flow_decode(fp);
        auto lf_hat_prev = net_->synth_initial(input_prev, app_flows_prev);
        auto tl = loss_temp(lf_hat_t, lf_hat_prev, flow_fw, flow_bw,
                            cfg_.valid_mask_tol);
        temp_warnings_ += tl.dropped_terms;
        row.l_temp = static_cast<double>(tl.value.item());
        total = nn::add(total, nn::scale(tl.value, static_cast<T>(cfg_.w_temp)));
      }
      row.l_occ = static_cast<double>(l_occ.item());
      row.l_percep = static_cast<double>(l_percep.item());
      total = nn::add(total, nn::add(nn::scale(l_occ, static_cast<T>(cfg_.w_occ)),
                                     nn::scale(l_percep, static_cast<T>(cfg_.w_percep))));
    }

    row.total = static_cast<double>(total.item());
    nn::backward(total);
    adam_->step();
    return row;
  }

 private:
  NetworkConfig cfg_;
  std::vector<core::LightFieldVideo> videos_;
  std::unique_ptr<Network<T>> net_;
  PerceptualStack<T> percep_;
  std::unique_ptr<nn::Adam<T>> adam_;
  Rng rng_;
  std::vector<TrainLogRow> log_;
  int temp_warnings_ = 0;
  bool frozen_ = true;
};

/// Frame-by-frame synthesis of a whole monocular sequence: frame pairs are
/// (t-1, t), with the first frame paired with itself.
template <class T = float>
inline core::LightFieldVideo synthesize_video(const Network<T>& net,
                                              const std::vector<core::Image>& frames) {
  LFV_CHECK_DOMAIN(!frames.empty(), "no input frames");
  nn::NoGradGuard ng;
  core::LightFieldVideo out;
  out.frames.reserve(frames.size());
  for (size_t t = 0; t < frames.size(); ++t) {
    const core::Image& prev = t == 0 ? frames[0] : frames[t - 1];
    auto synth = net.synthesize_frame(frames[t], prev);
    out.frames.push_back(tensor_to_lightfield(synth.lf_final, static_cast<int>(t)));
  }
  return out;
}

}  // namespace lfv::model
