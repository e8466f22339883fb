#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "umsa/manifest.hpp"

namespace umsa {

enum class SplitScheme { KFold, LOUO };

struct SplitPlan {
  SplitScheme scheme = SplitScheme::KFold;
  int n_folds = 0;
  uint64_t seed = 0;
  std::map<std::string, int> assignment;  // trial_id -> fold

  std::string scheme_string() const;
};

// "kfold:4" or "louo".
std::pair<SplitScheme, int> parse_scheme(const std::string &s);

// KFold: seeded shuffle then round-robin deal, fold sizes differ by at
// most one. LOUO: one fold per distinct user (sorted user ids).
SplitPlan make_splits(const Manifest &m, SplitScheme scheme, int k, uint64_t seed);

void write_splits(const SplitPlan &plan, const std::filesystem::path &path);
SplitPlan read_splits(const std::filesystem::path &path);

}  // namespace umsa
