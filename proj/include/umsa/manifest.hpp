#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "umsa/trial.hpp"

namespace umsa {

struct ManifestEntry {
  std::string trial_id;
  std::string task_id;
  std::string user_id;
  double grs = 0.0;
  double grs_min = 0.0;
  double grs_max = 1.0;
  std::map<PathId, std::string> sequence_files;  // relative to the manifest
};

struct Manifest {
  std::filesystem::path dir;  // directory the manifest was read from / written to
  std::vector<ManifestEntry> trials;
};

// Validates unique trial ids and that every referenced file exists.
Manifest read_manifest(const std::filesystem::path &path);
void write_manifest(const Manifest &m, const std::filesystem::path &path);

// Loads sequences from disk, optionally resampling source_fps -> target_fps.
Trial load_trial(const Manifest &m, const ManifestEntry &e, double source_fps = 1.0,
                 double target_fps = 1.0);
std::vector<Trial> load_trials(const Manifest &m, double source_fps = 1.0,
                               double target_fps = 1.0);

}  // namespace umsa
