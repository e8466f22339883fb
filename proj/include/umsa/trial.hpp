#pragma once

#include <map>
#include <string>

#include "umsa/paths.hpp"
#include "umsa/tensor.hpp"

namespace umsa {

// y = (grs - min) / (max - min). Throws DataError if grs is outside the range.
double normalize_grs(double grs, double grs_min, double grs_max);
// Exact inverse of normalize_grs.
double denormalize_grs(double y, double grs_min, double grs_max);

// One trial: per-path feature sequences plus the ground-truth score.
struct Trial {
  std::string trial_id;
  std::string task_id;
  std::string user_id;
  double grs = 0.0;
  double grs_min = 0.0;
  double grs_max = 1.0;
  std::map<PathId, Tensor2D> features;

  // Common sequence length. Throws DataError when paths disagree or no
  // features are present.
  int length() const;
  // Normalized target in [0, 1].
  double y() const { return normalize_grs(grs, grs_min, grs_max); }
};

}  // namespace umsa
