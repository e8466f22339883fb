#pragma once

#include <deque>
#include <span>
#include <string>
#include <string_view>

#include "umsa/tensor.hpp"

namespace umsa {

// One learnable matrix with its gradient accumulator and Adam moments.
struct Param {
  std::string name;
  Tensor2D value;
  Tensor2D grad;
  Tensor2D m;  // first moment
  Tensor2D v;  // second moment
  bool grad_set = false;

  Param() = default;
  Param(std::string n, Tensor2D init);
  void zero_grad();
};

// Named group of parameters (the weights and biases of one function).
// Deque storage keeps Param pointers stable as entries are added.
struct ParamBlock {
  std::string name;
  std::deque<Param> entries;

  Param &add(std::string_view entry_name, Tensor2D init);
  Param *find(std::string_view entry_name);
  const Param *find(std::string_view entry_name) const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. One shared step counter per instance.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update to every param and clears gradients. grad_scale
  // multiplies accumulated gradients first (1/batch for accumulation).
  // Throws UsageError if any param has no populated gradient.
  void step(std::span<Param *const> params, double grad_scale = 1.0);

  long step_count() const { return t_; }
  const AdamConfig &config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace umsa
