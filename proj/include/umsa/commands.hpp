#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace umsa {

// Command implementations behind the CLI. Each writes its declared
// outputs plus a run.json provenance record and returns 0 on success;
// failures are reported by throwing.

struct GenerateOpts {
  std::filesystem::path config;
  std::filesystem::path out;
  bool force = false;
};
int cmd_generate(const GenerateOpts &opts);

struct SplitsOpts {
  std::filesystem::path manifest;
  std::string scheme = "kfold:3";
  std::optional<uint64_t> seed;  // defaults to 0 when unset
  std::filesystem::path out;
};
int cmd_splits(const SplitsOpts &opts);

struct TrainOpts {
  std::filesystem::path config;
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> splits;
  int fold = 0;  // used only when splits are given: train on out-of-fold trials
  std::filesystem::path out;
  std::optional<std::string> paths;  // overrides [paths] active
};
int cmd_train(const TrainOpts &opts);

struct EvalOpts {
  std::filesystem::path config;
  std::filesystem::path manifest;
  std::filesystem::path splits;
  std::filesystem::path out;
  std::optional<std::string> paths;
};
int cmd_eval(const EvalOpts &opts);

struct AnalyzeOpts {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  char feature_path = 'E';       // whose input channels to correlate against
  std::vector<int> channels;
  std::optional<std::string> paths;  // included score paths, default: all active
  std::filesystem::path out;
};
int cmd_analyze(const AnalyzeOpts &opts);

}  // namespace umsa
