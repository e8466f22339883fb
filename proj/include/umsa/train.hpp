#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "umsa/model.hpp"
#include "umsa/optim.hpp"

namespace umsa {

struct TrainConfig {
  int epochs = 60;
  AdamConfig adam;      // lr 1e-3, betas 0.9/0.999, eps 1e-8
  int accumulation = 8; // trials per optimizer step
  int n_runs = 5;
  uint64_t seed = 42;
  int jobs = 1;

  void validate() const;
};

struct EpochStats {
  double mse = 0.0;
  double con = 0.0;
  double full = 0.0;
};

// Trains in place: per epoch, shuffles the trial order, accumulates
// gradients over `accumulation` trials and applies one Adam step per
// group (averaged gradients). Returns per-epoch mean losses.
std::vector<EpochStats> train_model(Model &model, std::span<const Trial *const> trials,
                                    const TrainConfig &cfg, Rng &rng);

}  // namespace umsa
