#pragma once

#include <functional>
#include <vector>

#include "umsa/optim.hpp"
#include "umsa/tensor.hpp"

namespace umsa {

class Tape;

// Handle to a node on the tape.
struct Val {
  int id = -1;
};

// Reverse-mode autodiff tape over Tensor2D ops. Nodes are append-only;
// backward sweeps them in reverse creation order, which is a valid
// topological order by construction. One tape serves one forward pass.
class Tape {
 public:
  // Input leaf. Gradients are computed for leaves too (tests read them).
  Val leaf(Tensor2D t);
  // Leaf bound to a parameter: backward accumulates into p.grad.
  Val param(Param &p);

  // kernel w is (K*Din) x Dout with K odd, bias b is 1 x Dout. Symmetric
  // zero padding keeps the output length equal to the input length.
  Val temporal_conv(Val x, Val w, Val b, int dilation);
  // Row-wise x*W + b. W is Din x Dout, b is 1 x Dout.
  Val affine(Val x, Val w, Val b);
  Val relu(Val x);
  Val sigmoid(Val x);
  // Softmax over the time dimension of an L x 1 sequence.
  Val softmax_time(Val x);
  Val concat_cols(const std::vector<Val> &xs);
  // out[0] = 0, out[i] = in[i-1].
  Val shift_down(Val x);
  Val add(Val a, Val b);
  Val sub(Val a, Val b);
  Val mul(Val a, Val b);
  Val scale(Val a, double c);
  Val add_const(Val a, double c);
  Val square(Val a);
  Val sum_all(Val a);    // 1x1
  Val dot_all(Val a, Val b);  // 1x1, sum of elementwise products
  // (target - pred)^2 for a scalar prediction.
  Val squared_error(Val pred, double target);
  // InfoNCE-style predictive loss: sum over i in [1, L-1] of
  // -log( exp(pred[i].target[i]) / sum_{j in N_i} exp(pred[i].target[j]) )
  // with N_i = [max(0,i-halfwidth), min(L-1,i+halfwidth)].
  Val contrastive(Val pred, Val target, int halfwidth);

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape once. loss must be 1x1.
  void backward(Val loss);

  const Tensor2D &value(Val v) const { return nodes_[v.id].value; }
  const Tensor2D &grad(Val v) const { return nodes_[v.id].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor2D value;
    Tensor2D grad;
    std::function<void(Tape &)> back;  // empty for leaves
    Param *bound = nullptr;
  };

  std::vector<Node> nodes_;
  bool swept_ = false;

  Val push(Tensor2D value, std::function<void(Tape &)> back, Param *bound = nullptr);
  Node &node(Val v) { return nodes_[v.id]; }
  void check(Val v) const;
};

}  // namespace umsa
