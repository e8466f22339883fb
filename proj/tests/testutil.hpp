#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "umsa/model.hpp"
#include "umsa/rng.hpp"
#include "umsa/tape.hpp"
#include "umsa/tensor.hpp"

namespace testutil {

struct BuiltGraph {
  umsa::Val loss;
  std::vector<umsa::Val> leaves;  // one per storage tensor, same order
};

// Central finite differences against the tape gradients. `build` must
// read the storage tensors afresh on every call. Returns the worst
// relative error over `samples` random coordinates.
inline double max_fd_relerr(const std::vector<umsa::Tensor2D *> &storages,
                            const std::function<BuiltGraph(umsa::Tape &)> &build,
                            int samples, umsa::Rng &rng, double h = 1e-5) {
  using umsa::Tape;
  using umsa::Tensor2D;

  Tape t0;
  BuiltGraph g0 = build(t0);
  t0.backward(g0.loss);
  std::vector<Tensor2D> analytic;
  analytic.reserve(g0.leaves.size());
  for (umsa::Val leaf : g0.leaves) analytic.push_back(t0.grad(leaf));

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto which =
        static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(storages.size()) - 1));
    Tensor2D *st = storages[which];
    const auto coord =
        static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(st->v.size()) - 1));
    const double saved = st->v[coord];
    st->v[coord] = saved + h;
    Tape tp;
    const double fp = tp.value(build(tp).loss).v[0];
    st->v[coord] = saved - h;
    Tape tm;
    const double fm = tm.value(build(tm).loss).v[0];
    st->v[coord] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    const double an = analytic[which].v[coord];
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-2});
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  return worst;
}

// O(n^2) counting ranks + direct Pearson: independent of the library's
// sort-based path.
inline double oracle_srocc(const std::vector<double> &a, const std::vector<double> &b) {
  auto rank = [](const std::vector<double> &v) {
    std::vector<double> r(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      size_t less = 0, eq = 0;
      for (size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++less;
        else if (v[j] == v[i] && j != i) ++eq;
      }
      r[i] = 1.0 + static_cast<double>(less) + static_cast<double>(eq) * 0.5;
    }
    return r;
  };
  const auto ra = rank(a);
  const auto rb = rank(b);
  const size_t n = ra.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) ma += ra[i], mb += rb[i];
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Direct sliding-window definition of the dilated convolution.
inline umsa::Tensor2D oracle_conv(const umsa::Tensor2D &x, const umsa::Tensor2D &w,
                                  const umsa::Tensor2D &b, int k, int dilation) {
  const int din = x.cols, dout = w.cols, half = (k - 1) / 2;
  umsa::Tensor2D out(x.rows, dout);
  for (int t = 0; t < x.rows; ++t)
    for (int co = 0; co < dout; ++co) {
      double acc = b.at(0, co);
      for (int kk = 0; kk < k; ++kk)
        for (int ci = 0; ci < din; ++ci) {
          const int src = t + (kk - half) * dilation;
          if (src >= 0 && src < x.rows) acc += w.at(kk * din + ci, co) * x.at(src, ci);
        }
      out.at(t, co) = acc;
    }
  return out;
}

// Finite differences on the full objective w.r.t. randomly sampled model
// parameters. Perturbs Param values in place and restores them.
inline double model_fd_relerr(umsa::Model &model, const umsa::Trial &trial, int samples,
                              umsa::Rng &rng, double h = 1e-5) {
  auto params = model.parameters();
  for (umsa::Param *p : params) p->zero_grad();
  {
    umsa::Tape t;
    auto fw = model.build_loss(t, trial);
    t.backward(fw.loss);
  }
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    umsa::Param *p =
        params[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(params.size()) - 1))];
    const auto coord =
        static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(p->value.v.size()) - 1));
    const double saved = p->value.v[coord];
    p->value.v[coord] = saved + h;
    const double fp = model.loss_parts(trial).full;
    p->value.v[coord] = saved - h;
    const double fm = model.loss_parts(trial).full;
    p->value.v[coord] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    const double an = p->grad.v[coord];
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-2});
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  for (umsa::Param *p : params) p->zero_grad();
  return worst;
}

inline umsa::Tensor2D random_tensor(int rows, int cols, umsa::Rng &rng, double lo = -1.0,
                                    double hi = 1.0) {
  umsa::Tensor2D t(rows, cols);
  for (double &e : t.v) e = rng.uniform(lo, hi);
  return t;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string &tag) {
    path = std::filesystem::temp_directory_path() /
           ("umsa_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testutil
