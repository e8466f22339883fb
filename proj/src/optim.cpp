#include "umsa/optim.hpp"

#include <cmath>
#include <utility>

#include "umsa/errors.hpp"

namespace umsa {

Param::Param(std::string n, Tensor2D init)
    : name(std::move(n)),
      value(std::move(init)),
      grad(value.rows, value.cols),
      m(value.rows, value.cols),
      v(value.rows, value.cols) {}

void Param::zero_grad() {
  grad.fill(0.0);
  grad_set = false;
}

Param &ParamBlock::add(std::string_view entry_name, Tensor2D init) {
  entries.emplace_back(name.empty() ? std::string(entry_name)
                                    : name + "." + std::string(entry_name),
                       std::move(init));
  return entries.back();
}

Param *ParamBlock::find(std::string_view entry_name) {
  for (auto &p : entries) {
    std::string_view n = p.name;
    if (auto pos = n.rfind('.'); pos != std::string_view::npos) n = n.substr(pos + 1);
    if (n == entry_name) return &p;
  }
  return nullptr;
}

const Param *ParamBlock::find(std::string_view entry_name) const {
  return const_cast<ParamBlock *>(this)->find(entry_name);
}

void Adam::step(std::span<Param *const> params, double grad_scale) {
  for (Param *p : params) {
    if (!p->grad_set)
      throw UsageError("adam step: parameter '" + p->name + "' has no gradient");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (Param *p : params) {
    for (size_t i = 0; i < p->value.v.size(); ++i) {
      const double g = p->grad.v[i] * grad_scale;
      p->m.v[i] = cfg_.beta1 * p->m.v[i] + (1.0 - cfg_.beta1) * g;
      p->v.v[i] = cfg_.beta2 * p->v.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = p->m.v[i] / bc1;
      const double vhat = p->v.v[i] / bc2;
      p->value.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p->zero_grad();
  }
}

}  // namespace umsa
