#pragma once

#include <filesystem>

#include "umsa/tensor.hpp"

namespace umsa {

// On-disk sequence layout, little-endian:
//   bytes 0..3   magic "UMSA"
//   bytes 4..5   format version (u16, currently 1)
//   bytes 6..9   L (u32 rows)
//   bytes 10..13 D (u32 cols)
//   then L*D float32 values, row-major.
inline constexpr uint16_t kSequenceFormatVersion = 1;

void write_sequence(const Tensor2D &t, const std::filesystem::path &path);
Tensor2D read_sequence(const std::filesystem::path &path);

// Nearest-index decimation: keeps rows round(i * source/target) while in
// range. Probability/histogram channels are decimated, never averaged.
Tensor2D resample(const Tensor2D &x, double source_rate, double target_rate);

}  // namespace umsa
