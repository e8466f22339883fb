#include "umsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "umsa/errors.hpp"

namespace umsa {

std::vector<double> fractional_ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    // positions i..j (0-based) share the average 1-based rank
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SroccResult srocc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("srocc: length mismatch");
  if (a.size() < 2) throw UsageError("srocc: need at least two observations");

  auto constant = [](std::span<const double> v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] != v[0]) return false;
    return true;
  };
  if (constant(a) || constant(b)) return {0.0, true};

  const auto ra = fractional_ranks(a);
  const auto rb = fractional_ranks(b);
  const size_t n = ra.size();
  const double ma = mean(ra), mb = mean(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double da = ra[i] - ma, db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return {sab / std::sqrt(saa * sbb), false};
}

double fisher_z_average(std::span<const double> rs, bool *clamped) {
  if (rs.empty()) throw UsageError("fisher_z_average: empty input");
  if (clamped) *clamped = false;
  constexpr double kLimit = 1.0 - 1e-7;
  double acc = 0.0;
  for (double r : rs) {
    if (r > kLimit || r < -kLimit) {
      r = std::clamp(r, -kLimit, kLimit);
      if (clamped) *clamped = true;
    }
    acc += std::atanh(r);
  }
  return std::tanh(acc / static_cast<double>(rs.size()));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace umsa
