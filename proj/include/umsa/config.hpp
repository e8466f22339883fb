#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "umsa/model.hpp"
#include "umsa/synth.hpp"
#include "umsa/train.hpp"

namespace umsa {

// Flat key/value run configuration with one section per module. Every
// field has a default; unknown sections or keys are rejected.
struct RunConfig {
  // [run]
  uint64_t seed = 42;
  int n_runs = 5;
  int jobs = 1;
  // [paths]
  std::string active = "VTPE";
  // [data]
  SynthConfig data;
  double source_fps = 1.0;
  double target_fps = 1.0;
  // [model]
  int embed_visual = 20;
  int embed_tool = 4;
  int embed_proxy = 1;
  int embed_event = 4;
  int encoder_layers = 2;
  int kernel_size = 3;
  int hidden = 16;
  bool contrastive = true;
  int contrastive_halfwidth = 8;
  // [train]
  int epochs = 60;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int accumulation = 8;

  static RunConfig load(const std::filesystem::path &path);
  static RunConfig parse(const std::string &text);

  // Fixed-order rendering used for documentation and hashing.
  std::string canonical_string() const;
  std::string hash() const;  // FNV-1a over canonical_string, hex

  SynthConfig synth_config() const;
  ModelConfig model_config() const;                       // active from [paths]
  ModelConfig model_config(const std::string &paths) const;  // explicit set
  TrainConfig train_config() const;

  void validate() const;
};

}  // namespace umsa
