#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace umsa {

// Dense row-major L x D matrix of doubles. Rows are time steps,
// columns are channels.
struct Tensor2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor2D() = default;
  Tensor2D(int r, int c);

  static Tensor2D zeros(int r, int c) { return Tensor2D(r, c); }
  static Tensor2D full(int r, int c, double x);
  static Tensor2D from(std::initializer_list<std::initializer_list<double>> data);
  // Column vector (L x 1).
  static Tensor2D column(std::initializer_list<double> data);
  static Tensor2D identity(int n);

  double &at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  double *row(int r) { return v.data() + static_cast<size_t>(r) * cols; }
  const double *row(int r) const { return v.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor2D &o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  void fill(double x);
  // this += s * other
  void add_scaled(const Tensor2D &other, double s);
  double max_abs_diff(const Tensor2D &other) const;
};

}  // namespace umsa
