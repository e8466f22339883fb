#pragma once

#include <span>
#include <vector>

namespace umsa {

struct SroccResult {
  double rho = 0.0;
  // True when either input is constant (rank correlation undefined;
  // rho is reported as 0) .
  bool degenerate = false;
};

// Average (fractional) ranks, 1-based.
std::vector<double> fractional_ranks(std::span<const double> v);

// Spearman rank correlation: Pearson on average ranks, tie-correct.
// Throws UsageError for mismatched lengths or n < 2.
SroccResult srocc(std::span<const double> a, std::span<const double> b);

// tanh(mean(atanh(r))). Correlations with |r| >= 1 are clamped to
// +-(1 - 1e-7); *clamped reports whether that happened.
double fisher_z_average(std::span<const double> rs, bool *clamped = nullptr);

double mean(std::span<const double> xs);
double stddev(std::span<const double> xs);  // population

}  // namespace umsa
