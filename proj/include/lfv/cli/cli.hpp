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

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfv/core/lightfield_ops.hpp"
#include "lfv/io/container.hpp"
#include "lfv/model/evaluate.hpp"
#include "lfv/model/trainer.hpp"
#include "lfv/nn/checkpoint.hpp"
#include "lfv/scenegen/scenegen.hpp"

namespace lfv::cli {

namespace fs = std::filesystem;

// Uniform exit codes across subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitIoFailure = 3;
inline constexpr int kExitNumericFailure = 4;

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

class ManifestWriter {
 public:
  ManifestWriter(std::string command, fs::path out_dir)
      : command_(std::move(command)),
        out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {}

  void set(const std::string& key, const nlohmann::json& value) { extra_[key] = value; }

  /// Written atomically (temp file + rename) when the run finishes.
  void finish() const {
    using namespace std::chrono;
    nlohmann::json j;
    j["command"] = command_;
    j["tool_version"] = kToolVersion;
    j["duration_seconds"] =
        duration_cast<duration<double>>(steady_clock::now() - start_).count();
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    fs::create_directories(out_dir_);
    const fs::path tmp = out_dir_ / "run_manifest.json.tmp";
    {
      std::ofstream f(tmp);
      if (!f) throw IoError("cannot write manifest: " + tmp.string());
      f << j.dump(2) << "\n";
    }
    fs::rename(tmp, out_dir_ / "run_manifest.json");
  }

 private:
  std::string command_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::json extra_;
};

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

struct GenOptions {
  std::string config;
  std::string out;
  uint64_t seed = 0;
};

inline scenegen::DatasetTemplate dataset_template_from_json(const nlohmann::json& j) {
  scenegen::DatasetTemplate t;
  if (j.contains("frames")) t.frames = j["frames"].get<int>();
  if (j.contains("width")) t.width = j["width"].get<int>();
  if (j.contains("height")) t.height = j["height"].get<int>();
  if (j.contains("channels")) t.channels = j["channels"].get<int>();
  if (j.contains("layers_min")) t.layers_min = j["layers_min"].get<int>();
  if (j.contains("layers_max")) t.layers_max = j["layers_max"].get<int>();
  if (j.contains("disparity_range")) {
    t.disparity_min = j["disparity_range"][0].get<float>();
    t.disparity_max = j["disparity_range"][1].get<float>();
  }
  if (j.contains("velocity_range")) {
    t.velocity_min = j["velocity_range"][0].get<float>();
    t.velocity_max = j["velocity_range"][1].get<float>();
  }
  if (j.contains("eta_scene")) t.eta_scene = j["eta_scene"].get<float>();
  if (j.contains("split")) t.test_split = j["split"].get<std::string>() == "test";
  return t;
}

inline int run_gen(const GenOptions& opt) {
  ManifestWriter manifest("gen", opt.out);
  nlohmann::json cfg = io::read_json_file(opt.config);
  const int n_scenes = cfg.value("n_scenes", 1);
  const std::string pixel_format = cfg.value("pixel_format", "pfm");
  scenegen::DatasetTemplate tmpl = dataset_template_from_json(cfg);

  auto specs = scenegen::make_scene_specs(n_scenes, tmpl, opt.seed);
  nlohmann::json index;
  index["n_scenes"] = n_scenes;
  index["seed"] = opt.seed;
  index["template"] = cfg;
  index["scenes"] = nlohmann::json::array();
  for (int i = 0; i < n_scenes; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03d", i);
    const fs::path dir = fs::path(opt.out) / name;
    scenegen::LightFieldVideo video = scenegen::render_video(specs[i]);
    io::write_container(dir, video, pixel_format, specs[i].eta_scene);
    io::write_json_file(dir / "scene.json", scenegen::to_json(specs[i]));
    index["scenes"].push_back(name);
    std::cout << "rendered " << name << " (" << specs[i].layers.size() << " layers, "
              << specs[i].frame_count << " frames)\n";
  }
  io::write_json_file(fs::path(opt.out) / "dataset.json", index);

  manifest.set("config", opt.config);
  manifest.set("seed", opt.seed);
  manifest.set("outputs", nlohmann::json{{"dataset", opt.out}});
  manifest.finish();
  return kExitOk;
}

struct TrainOptions {
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<uint64_t> seed;
};

inline int run_train(const TrainOptions& opt) {
  ManifestWriter manifest("train", opt.out);
  model::NetworkConfig cfg = model::config_from_json(io::read_json_file(opt.config));
  if (opt.seed) cfg.seed = *opt.seed;

  std::vector<core::LightFieldVideo> videos;
  for (const auto& dir : io::list_scene_dirs(opt.dataset))
    videos.push_back(io::read_container(dir));
  std::cout << "training on " << videos.size() << " scenes, " << cfg.total_iters
            << " iterations (warmup " << cfg.warmup_iters << ")\n";

  fs::create_directories(opt.out);
  std::ofstream csv(fs::path(opt.out) / "loss_log.csv");
  if (!csv) throw IoError("cannot write loss log");
  csv << model::train_log_header() << "\n";

  model::Trainer<float> trainer(std::move(videos), cfg);
  trainer.run([&](const model::TrainLogRow& row) {
    csv << model::format_log_row(row) << "\n";
    if (row.iteration % 50 == 0)
      std::cout << "iter " << row.iteration << " phase " << row.phase << " total "
                << row.total << "\n";
  });
  csv.flush();

  const fs::path ckpt = fs::path(opt.out) / "checkpoint.lfvckpt";
  nn::save_checkpoint(ckpt.string(), trainer.network().registry(),
                      model::to_json(cfg));
  std::cout << "checkpoint written to " << ckpt << "\n";

  manifest.set("config", opt.config);
  manifest.set("seed", cfg.seed);
  manifest.set("inputs", nlohmann::json{{"dataset", opt.dataset}});
  manifest.set("outputs", nlohmann::json{{"checkpoint", ckpt.string()},
                                         {"loss_log", (fs::path(opt.out) / "loss_log.csv").string()}});
  manifest.finish();
  return kExitOk;
}

struct SynthOptions {
  std::string checkpoint;
  std::string input;
  std::string out;
  std::string pixel_format = "pfm";
};

/// Rebuilds the network from the config stored in the checkpoint.
inline std::unique_ptr<model::Network<float>> load_network(const std::string& ckpt) {
  // Peek at the stored config first to size the registry correctly.
  nlohmann::json meta;
  {
    std::ifstream f(ckpt, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + ckpt);
    char magic[8];
    f.read(magic, 8);
    unsigned char lenb[8];
    f.read(reinterpret_cast<char*>(lenb), 8);
    uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= static_cast<uint64_t>(lenb[i]) << (8 * i);
    std::string js(len, '\0');
    f.read(js.data(), static_cast<std::streamsize>(len));
    if (!f) throw IoError("truncated checkpoint: " + ckpt);
    meta = nlohmann::json::parse(js).value("meta", nlohmann::json::object());
  }
  model::NetworkConfig cfg =
      meta.empty() ? model::NetworkConfig{} : model::config_from_json(meta);
  auto net = std::make_unique<model::Network<float>>(cfg);
  nn::load_checkpoint(ckpt, net->registry());
  return net;
}

inline int run_synth(const SynthOptions& opt) {
  ManifestWriter manifest("synth", opt.out);
  auto net = load_network(opt.checkpoint);
  std::vector<core::Image> frames = io::read_center_video(opt.input);
  LFV_CHECK_SHAPE(!frames.empty() &&
                      frames[0].channels == net->config().input_channels,
                  "input video channel count does not match the checkpoint");
  std::cout << "synthesizing " << frames.size() << " light field frames\n";
  core::LightFieldVideo video = model::synthesize_video(*net, frames);
  const fs::path container = fs::path(opt.out) / "lightfield";
  io::write_container(container, video, opt.pixel_format, net->config().eta);

  manifest.set("inputs", nlohmann::json{{"checkpoint", opt.checkpoint},
                                        {"video", opt.input}});
  manifest.set("outputs", nlohmann::json{{"container", container.string()}});
  manifest.finish();
  return kExitOk;
}

struct EvalOptions {
  std::string pred;
  std::string gt;
  std::string out;
  std::string dataset_name = "dataset";
};

inline int run_eval(const EvalOptions& opt) {
  ManifestWriter manifest("eval", opt.out);
  core::LightFieldVideo pred = io::read_container(opt.pred);
  core::LightFieldVideo gt = io::read_container(opt.gt);
  model::VideoMetrics vm = model::evaluate_video(pred, gt);

  fs::create_directories(opt.out);
  {
    std::ofstream f(fs::path(opt.out) / "metrics.csv");
    f << model::format_metrics_csv(vm);
  }
  const std::string summary = model::format_metrics_summary(vm, opt.dataset_name);
  {
    std::ofstream f(fs::path(opt.out) / "summary.txt");
    f << summary;
  }
  std::cout << summary;

  manifest.set("inputs", nlohmann::json{{"pred", opt.pred}, {"gt", opt.gt}});
  manifest.set("outputs",
               nlohmann::json{{"metrics", (fs::path(opt.out) / "metrics.csv").string()},
                              {"summary", (fs::path(opt.out) / "summary.txt").string()}});
  manifest.finish();
  return kExitOk;
}

struct RefocusOptions {
  std::string input;
  std::string out;
  float disparity = 0.0f;
  int frame = -1;  // -1 = all frames
};

inline int run_refocus(const RefocusOptions& opt) {
  ManifestWriter manifest("refocus", opt.out);
  core::LightFieldVideo video = io::read_container(opt.input);
  fs::create_directories(opt.out);
  const int t0 = opt.frame < 0 ? 0 : opt.frame;
  const int t1 = opt.frame < 0 ? static_cast<int>(video.frames.size()) : opt.frame + 1;
  LFV_CHECK_DOMAIN(t0 >= 0 && t1 <= static_cast<int>(video.frames.size()),
                   "frame index out of range");
  for (int t = t0; t < t1; ++t) {
    core::Image img = core::refocus(video.frames[t], opt.disparity);
    char name[48];
    std::snprintf(name, sizeof(name), "refocus_frame_%06d.png", t);
    io::write_png((fs::path(opt.out) / name).string(), img);
  }
  manifest.set("inputs", nlohmann::json{{"video", opt.input}});
  manifest.set("disparity", opt.disparity);
  manifest.finish();
  return kExitOk;
}

struct EpiOptions {
  std::string input;
  std::string out;
  int row = 0;
  int fixed_v = 0;
  int frame = -1;
};

inline int run_epi(const EpiOptions& opt) {
  ManifestWriter manifest("epi", opt.out);
  core::LightFieldVideo video = io::read_container(opt.input);
  fs::create_directories(opt.out);
  const int t0 = opt.frame < 0 ? 0 : opt.frame;
  const int t1 = opt.frame < 0 ? static_cast<int>(video.frames.size()) : opt.frame + 1;
  LFV_CHECK_DOMAIN(t0 >= 0 && t1 <= static_cast<int>(video.frames.size()),
                   "frame index out of range");
  for (int t = t0; t < t1; ++t) {
    core::EpiSlice slice;
    slice.axis = core::EpiSlice::Axis::kRow;
    slice.fixed_spatial = opt.row;
    slice.fixed_angular = opt.fixed_v;
    core::Image epi = core::extract_epi(video.frames[t], slice);
    char name[48];
    std::snprintf(name, sizeof(name), "epi_frame_%06d.png", t);
    io::write_png((fs::path(opt.out) / name).string(), epi);
  }
  manifest.set("inputs", nlohmann::json{{"video", opt.input}});
  manifest.set("row", opt.row);
  manifest.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
  CLI::App app{"light field video synthesis toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* cmd_gen = app.add_subcommand("gen", "render a synthetic light field dataset");
  cmd_gen->add_option("--config", gen.config, "dataset template JSON")->required();
  cmd_gen->add_option("--out", gen.out, "output directory")->required();
  cmd_gen->add_option("--seed", gen.seed, "base seed");

  TrainOptions train;
  auto* cmd_train = app.add_subcommand("train", "train the synthesis network");
  cmd_train->add_option("--config", train.config, "training config JSON")->required();
  cmd_train->add_option("--dataset", train.dataset, "dataset directory")->required();
  cmd_train->add_option("--out", train.out, "output directory")->required();
  uint64_t train_seed = 0;
  auto* seed_opt = cmd_train->add_option("--seed", train_seed, "override config seed");

  SynthOptions synth;
  auto* cmd_synth = app.add_subcommand("synth", "synthesize a light field video");
  cmd_synth->add_option("--checkpoint", synth.checkpoint, "trained checkpoint")
      ->required();
  cmd_synth->add_option("--input", synth.input, "input video container")->required();
  cmd_synth->add_option("--out", synth.out, "output directory")->required();
  cmd_synth->add_option("--format", synth.pixel_format, "pfm or png");

  EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate against ground truth");
  cmd_eval->add_option("--pred", eval.pred, "predicted container")->required();
  cmd_eval->add_option("--gt", eval.gt, "ground-truth container")->required();
  cmd_eval->add_option("--out", eval.out, "output directory")->required();
  cmd_eval->add_option("--name", eval.dataset_name, "dataset label in the report");

  RefocusOptions refocus;
  auto* cmd_refocus = app.add_subcommand("refocus", "render refocused frames");
  cmd_refocus->add_option("--input", refocus.input, "light field container")->required();
  cmd_refocus->add_option("--disparity", refocus.disparity, "refocus disparity")
      ->required();
  cmd_refocus->add_option("--out", refocus.out, "output directory")->required();
  cmd_refocus->add_option("--frame", refocus.frame, "single frame index");

  EpiOptions epi;
  auto* cmd_epi = app.add_subcommand("epi", "extract epipolar plane images");
  cmd_epi->add_option("--input", epi.input, "light field container")->required();
  cmd_epi->add_option("--row", epi.row, "image row to slice")->required();
  cmd_epi->add_option("--v", epi.fixed_v, "fixed angular v index");
  cmd_epi->add_option("--out", epi.out, "output directory")->required();
  cmd_epi->add_option("--frame", epi.frame, "single frame index");

  // CLI11 wants argv-style reversed arguments.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_train->parsed()) {
      if (*seed_opt) train.seed = train_seed;
      return run_train(train);
    }
    if (cmd_synth->parsed()) return run_synth(synth);
    if (cmd_eval->parsed()) return run_eval(eval);
    if (cmd_refocus->parsed()) return run_refocus(refocus);
    if (cmd_epi->parsed()) return run_epi(epi);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumericFailure;
  } catch (const IoError& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return kExitIoFailure;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace lfv::cli
