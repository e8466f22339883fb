#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "umsa/manifest.hpp"
#include "umsa/trial.hpp"

namespace umsa {

// Synthetic trial generator with a planted skill latent u ~ Uniform[0,1].
// Event workflow loops more when unskilled, the tool trajectory gets
// longer and jerkier, the proxy channel reads u directly plus noise, and
// the visual channel is a fixed random projection of everything else.
struct SynthConfig {
  int n_trials = 60;
  int length_min = 200;
  int length_max = 600;
  int dim_visual = 12;
  int dim_tool = 9;  // must be a perfect square (spatial grid cells)
  int dim_proxy = 1;
  int event_classes = 8;
  int n_users = 6;
  int n_tasks = 1;
  double noise_event = 0.10;
  double noise_tool = 0.05;
  double noise_proxy = 0.05;
  double noise_visual = 0.25;
  double grs_noise = 0.05;  // fraction of the GRS range, uniform, clipped
  double grs_min = 6.0;
  double grs_max = 30.0;
  double backward_jump = 0.3;  // probability that a workflow move goes backward at u=0
  double advance_prob = 0.05;  // per-step probability of a workflow move
  uint64_t seed = 42;

  void validate() const;
};

struct SynthTrial {
  Trial trial;
  double latent = 0.0;      // planted skill u
  int backward_jumps = 0;   // event-path moves that went backward
};

std::vector<SynthTrial> synth_generate(const SynthConfig &cfg);

// Writes sequence files plus manifest.json under out_dir.
Manifest write_synth_trials(std::span<const SynthTrial> trials,
                            const std::filesystem::path &out_dir);

// Generates, writes and returns the manifest.
Manifest synth_write(const SynthConfig &cfg, const std::filesystem::path &out_dir);

}  // namespace umsa
