#include "umsa/trial.hpp"

#include "umsa/errors.hpp"

namespace umsa {

double normalize_grs(double grs, double grs_min, double grs_max) {
  if (!(grs_min < grs_max)) throw DataError("grs range: min must be below max");
  if (grs < grs_min || grs > grs_max)
    throw DataError("grs " + std::to_string(grs) + " outside range [" +
                    std::to_string(grs_min) + ", " + std::to_string(grs_max) + "]");
  return (grs - grs_min) / (grs_max - grs_min);
}

double denormalize_grs(double y, double grs_min, double grs_max) {
  if (!(grs_min < grs_max)) throw DataError("grs range: min must be below max");
  return grs_min + y * (grs_max - grs_min);
}

int Trial::length() const {
  if (features.empty()) throw DataError("trial '" + trial_id + "' has no feature sequences");
  int len = -1;
  for (const auto &[id, seq] : features) {
    if (len < 0) len = seq.rows;
    if (seq.rows != len)
      throw DataError("trial '" + trial_id + "' has inconsistent sequence lengths");
  }
  return len;
}

}  // namespace umsa
