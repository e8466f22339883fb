#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "umsa/model.hpp"
#include "umsa/splits.hpp"
#include "umsa/train.hpp"

namespace umsa {

struct Prediction {
  std::string trial_id;
  std::string task_id;
  double y = 0.0;  // normalized ground truth
  double q = 0.0;  // model prediction
};

struct FoldResult {
  int fold = 0;
  std::vector<Prediction> predictions;
  double srocc_value = 0.0;
  bool degenerate = false;  // fewer than 2 test trials, or constant vectors
};

struct TaskCorrelation {
  std::string task_id;
  double srocc_value = 0.0;
  bool degenerate = false;
};

struct RunResult {
  int run = 0;
  std::vector<FoldResult> folds;
  std::vector<TaskCorrelation> per_task;
  double overall = 0.0;  // Fisher-z average across tasks
};

struct EvalReport {
  std::string scheme;
  std::string paths;
  int n_runs = 0;
  uint64_t seed = 0;
  std::vector<RunResult> runs;
  double overall_mean = 0.0;
  double overall_std = 0.0;

  nlohmann::json to_json() const;
};

// For every run seed and fold: train on out-of-fold trials from fresh
// parameters, predict in-fold trials, pool predictions per task, compute
// SROCC per task and the Fisher-z overall. Deterministic for a given
// (trials, splits, configs) regardless of tcfg.jobs.
EvalReport cross_validate(const std::vector<Trial> &trials, const SplitPlan &splits,
                          const ModelConfig &mcfg, const TrainConfig &tcfg);

// Mean over included paths of |srocc(S_m*W_m, feature channel c)|,
// averaged over trials. A proxy path whose weighted score sequence is
// constant is left out; other constant sequences contribute 0.
double correlation_analysis(std::span<const ForwardTrace> traces,
                            std::span<const Tensor2D> features, int channel,
                            std::span<const PathId> included);

}  // namespace umsa
