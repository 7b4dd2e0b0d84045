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

#include <json.hpp>

#include "lfv/core/common.hpp"

namespace lfv::model {

/// Everything that shapes the network and its training run. Loaded from a
/// flat JSON key-value file; unknown keys are rejected to catch typos.
struct NetworkConfig {
  // architecture
  int base_channels = 16;       // encoder channels are bc/2bc/4bc/4bc
  int encoder_depth = 4;        // conv layers in the initial encoder
  int correlation_max_disp = 4; // 81 displacement channels
  int input_channels = 1;       // channels of the frames being synthesized
  float eta = 1.0f;             // input-shift constant, px/view
  float flow_cap = 5.0f;        // appearance flow bound (tanh scale)
  bool correlation_bypass = false;

  // losses
  float w_global = 1.0f;
  float w_local = 1.0f;
  float w_occ = 1.0f;
  float w_percep = 0.1f;
  float w_temp = 0.5f;
  float w_flow = 1.0f;
  float flow_smoothness = 0.1f;
  float valid_mask_tol = 1.0f;
  float variance_mask_percentile = 90.0f;

  // training
  int warmup_iters = 2000;
  int total_iters = 10000;
  int crop = 64;
  uint64_t seed = 0;
  double learning_rate = 2e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;

  void validate() const {
    LFV_CHECK_DOMAIN(base_channels >= 2, "base_channels too small");
    LFV_CHECK_DOMAIN(encoder_depth == 4, "the initial encoder has four layers");
    LFV_CHECK_DOMAIN(correlation_max_disp >= 0, "negative correlation range");
    LFV_CHECK_DOMAIN(input_channels == 1 || input_channels == 3,
                     "input_channels must be 1 or 3");
    LFV_CHECK_DOMAIN(w_global >= 0 && w_local >= 0 && w_occ >= 0 && w_percep >= 0 &&
                         w_temp >= 0 && w_flow >= 0,
                     "loss weights must be non-negative");
    LFV_CHECK_DOMAIN(warmup_iters <= total_iters,
                     "warmup_iters must not exceed total_iters");
    LFV_CHECK_DOMAIN(crop >= 16, "crop must be at least 16");
    LFV_CHECK_DOMAIN(crop % 8 == 0, "crop must be a multiple of 8");
    LFV_CHECK_DOMAIN(flow_cap > 0, "flow_cap must be positive");
  }
};

inline nlohmann::json to_json(const NetworkConfig& c) {
  return nlohmann::json{{"base_channels", c.base_channels},
                        {"encoder_depth", c.encoder_depth},
                        {"correlation_max_disp", c.correlation_max_disp},
                        {"input_channels", c.input_channels},
                        {"eta", c.eta},
                        {"flow_cap", c.flow_cap},
                        {"correlation_bypass", c.correlation_bypass},
                        {"w_global", c.w_global},
                        {"w_local", c.w_local},
                        {"w_occ", c.w_occ},
                        {"w_percep", c.w_percep},
                        {"w_temp", c.w_temp},
                        {"w_flow", c.w_flow},
                        {"flow_smoothness", c.flow_smoothness},
                        {"valid_mask_tol", c.valid_mask_tol},
                        {"variance_mask_percentile", c.variance_mask_percentile},
                        {"warmup_iters", c.warmup_iters},
                        {"total_iters", c.total_iters},
                        {"crop", c.crop},
                        {"seed", c.seed},
                        {"learning_rate", c.learning_rate},
                        {"adam_beta1", c.adam_beta1},
                        {"adam_beta2", c.adam_beta2}};
}

inline NetworkConfig config_from_json(const nlohmann::json& j) {
  NetworkConfig c;
  const nlohmann::json defaults = to_json(c);
  for (const auto& [key, value] : j.items())
    LFV_CHECK_USAGE(defaults.contains(key), "unknown config key '", key, "'");
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
  };
  get("base_channels", c.base_channels);
  get("encoder_depth", c.encoder_depth);
  get("correlation_max_disp", c.correlation_max_disp);
  get("input_channels", c.input_channels);
  get("eta", c.eta);
  get("flow_cap", c.flow_cap);
  get("correlation_bypass", c.correlation_bypass);
  get("w_global", c.w_global);
  get("w_local", c.w_local);
  get("w_occ", c.w_occ);
  get("w_percep", c.w_percep);
  get("w_temp", c.w_temp);
  get("w_flow", c.w_flow);
  get("flow_smoothness", c.flow_smoothness);
  get("valid_mask_tol", c.valid_mask_tol);
  get("variance_mask_percentile", c.variance_mask_percentile);
  get("warmup_iters", c.warmup_iters);
  get("total_iters", c.total_iters);
  get("crop", c.crop);
  get("seed", c.seed);
  get("learning_rate", c.learning_rate);
  get("adam_beta1", c.adam_beta1);
  get("adam_beta2", c.adam_beta2);
  c.validate();
  return c;
}

}  // namespace lfv::model
