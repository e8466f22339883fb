#include "umsa/tensor.hpp"

#include <cmath>

#include "umsa/errors.hpp"

namespace umsa {

Tensor2D::Tensor2D(int r, int c) : rows(r), cols(c) {
  if (r < 0 || c < 0) throw ShapeError("tensor dimensions must be non-negative");
  v.assign(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0);
}

Tensor2D Tensor2D::full(int r, int c, double x) {
  Tensor2D t(r, c);
  t.fill(x);
  return t;
}

Tensor2D Tensor2D::from(std::initializer_list<std::initializer_list<double>> data) {
  int r = static_cast<int>(data.size());
  int c = r > 0 ? static_cast<int>(data.begin()->size()) : 0;
  Tensor2D t(r, c);
  int i = 0;
  for (const auto &row : data) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("ragged initializer");
    int j = 0;
    for (double x : row) t.at(i, j++) = x;
    ++i;
  }
  return t;
}

Tensor2D Tensor2D::column(std::initializer_list<double> data) {
  Tensor2D t(static_cast<int>(data.size()), 1);
  int i = 0;
  for (double x : data) t.at(i++, 0) = x;
  return t;
}

Tensor2D Tensor2D::identity(int n) {
  Tensor2D t(n, n);
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

bool Tensor2D::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void Tensor2D::fill(double x) {
  for (double &e : v) e = x;
}

void Tensor2D::add_scaled(const Tensor2D &other, double s) {
  if (!same_shape(other)) throw ShapeError("add_scaled: shape mismatch");
  for (size_t i = 0; i < v.size(); ++i) v[i] += s * other.v[i];
}

double Tensor2D::max_abs_diff(const Tensor2D &other) const {
  if (!same_shape(other)) throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i] - other.v[i]));
  return m;
}

}  // namespace umsa
