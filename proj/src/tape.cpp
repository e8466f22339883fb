#include "umsa/tape.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "umsa/errors.hpp"

namespace umsa {

Val Tape::push(Tensor2D value, std::function<void(Tape &)> back, Param *bound) {
  Node n;
  n.grad = Tensor2D(value.rows, value.cols);
  n.value = std::move(value);
  n.back = std::move(back);
  n.bound = bound;
  nodes_.push_back(std::move(n));
  return Val{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Val v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw UsageError("tape: value handle does not belong to this tape");
}

Val Tape::leaf(Tensor2D t) {
  if (t.rows < 1 || t.cols < 1) throw ShapeError("leaf: empty tensor");
  return push(std::move(t), nullptr);
}

Val Tape::param(Param &p) {
  Val v = push(p.value, nullptr, &p);
  return v;
}

Val Tape::temporal_conv(Val xv, Val wv, Val bv, int dilation) {
  check(xv), check(wv), check(bv);
  const Tensor2D &x = value(xv);
  const Tensor2D &w = value(wv);
  const Tensor2D &b = value(bv);
  const int din = x.cols;
  if (w.rows % din != 0)
    throw ShapeError("temporal_conv: kernel rows not a multiple of input channels");
  const int k = w.rows / din;
  if (k % 2 == 0) throw UsageError("temporal_conv: kernel size must be odd");
  if (dilation < 1) throw UsageError("temporal_conv: dilation must be positive");
  const int dout = w.cols;
  if (b.rows != 1 || b.cols != dout) throw ShapeError("temporal_conv: bias shape mismatch");

  const int rows = x.rows;
  const int half = (k - 1) / 2;
  Tensor2D out(rows, dout);
  for (int t = 0; t < rows; ++t) {
    double *orow = out.row(t);
    const double *brow = b.row(0);
    for (int co = 0; co < dout; ++co) orow[co] = brow[co];
    for (int kk = 0; kk < k; ++kk) {
      const int src = t + (kk - half) * dilation;
      if (src < 0 || src >= rows) continue;
      const double *xrow = x.row(src);
      for (int ci = 0; ci < din; ++ci) {
        const double xval = xrow[ci];
        const double *wrow = w.row(kk * din + ci);
        for (int co = 0; co < dout; ++co) orow[co] += xval * wrow[co];
      }
    }
  }

  const int xid = xv.id, wid = wv.id, bid = bv.id;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id;
  nodes_[oid].back = [xid, wid, bid, oid, k, dilation, half](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &x = tp.nodes_[xid].value;
    const Tensor2D &w = tp.nodes_[wid].value;
    Tensor2D &dx = tp.nodes_[xid].grad;
    Tensor2D &dw = tp.nodes_[wid].grad;
    Tensor2D &db = tp.nodes_[bid].grad;
    const int rows = x.rows, din = x.cols, dout = w.cols;
    for (int t = 0; t < rows; ++t) {
      const double *grow = g.row(t);
      double *dbrow = db.row(0);
      for (int co = 0; co < dout; ++co) dbrow[co] += grow[co];
      for (int kk = 0; kk < k; ++kk) {
        const int src = t + (kk - half) * dilation;
        if (src < 0 || src >= rows) continue;
        const double *xrow = x.row(src);
        double *dxrow = dx.row(src);
        for (int ci = 0; ci < din; ++ci) {
          const double xval = xrow[ci];
          const double *wrow = w.row(kk * din + ci);
          double *dwrow = dw.row(kk * din + ci);
          double acc = 0.0;
          for (int co = 0; co < dout; ++co) {
            dwrow[co] += xval * grow[co];
            acc += wrow[co] * grow[co];
          }
          dxrow[ci] += acc;
        }
      }
    }
  };
  return out_v;
}

Val Tape::affine(Val xv, Val wv, Val bv) {
  check(xv), check(wv), check(bv);
  const Tensor2D &x = value(xv);
  const Tensor2D &w = value(wv);
  const Tensor2D &b = value(bv);
  if (w.rows != x.cols) throw ShapeError("affine: weight rows must match input channels");
  if (b.rows != 1 || b.cols != w.cols) throw ShapeError("affine: bias shape mismatch");

  const int rows = x.rows, din = x.cols, dout = w.cols;
  Tensor2D out(rows, dout);
  for (int t = 0; t < rows; ++t) {
    const double *xrow = x.row(t);
    double *orow = out.row(t);
    const double *brow = b.row(0);
    for (int co = 0; co < dout; ++co) orow[co] = brow[co];
    for (int ci = 0; ci < din; ++ci) {
      const double xval = xrow[ci];
      const double *wrow = w.row(ci);
      for (int co = 0; co < dout; ++co) orow[co] += xval * wrow[co];
    }
  }

  const int xid = xv.id, wid = wv.id, bid = bv.id;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id;
  nodes_[oid].back = [xid, wid, bid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &x = tp.nodes_[xid].value;
    const Tensor2D &w = tp.nodes_[wid].value;
    Tensor2D &dx = tp.nodes_[xid].grad;
    Tensor2D &dw = tp.nodes_[wid].grad;
    Tensor2D &db = tp.nodes_[bid].grad;
    const int rows = x.rows, din = x.cols, dout = w.cols;
    for (int t = 0; t < rows; ++t) {
      const double *grow = g.row(t);
      const double *xrow = x.row(t);
      double *dxrow = dx.row(t);
      double *dbrow = db.row(0);
      for (int co = 0; co < dout; ++co) dbrow[co] += grow[co];
      for (int ci = 0; ci < din; ++ci) {
        const double xval = xrow[ci];
        const double *wrow = w.row(ci);
        double *dwrow = dw.row(ci);
        double acc = 0.0;
        for (int co = 0; co < dout; ++co) {
          dwrow[co] += xval * grow[co];
          acc += wrow[co] * grow[co];
        }
        dxrow[ci] += acc;
      }
    }
  };
  return out_v;
}

Val Tape::relu(Val xv) {
  check(xv);
  const Tensor2D &x = value(xv);
  Tensor2D out = x;
  for (double &e : out.v) e = e > 0.0 ? e : 0.0;
  const int xid = xv.id;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id;
  nodes_[oid].back = [xid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &x = tp.nodes_[xid].value;
    Tensor2D &dx = tp.nodes_[xid].grad;
    for (size_t i = 0; i < x.v.size(); ++i)
      if (x.v[i] > 0.0) dx.v[i] += g.v[i];
  };
  return out_v;
}

Val Tape::sigmoid(Val xv) {
  check(xv);
  const Tensor2D &x = value(xv);
  Tensor2D out(x.rows, x.cols);
  for (size_t i = 0; i < x.v.size(); ++i) {
    const double e = x.v[i];
    out.v[i] = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e))
                        : std::exp(e) / (1.0 + std::exp(e));
  }
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, xid = xv.id;
  nodes_[oid].back = [xid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &s = tp.nodes_[oid].value;
    Tensor2D &dx = tp.nodes_[xid].grad;
    for (size_t i = 0; i < s.v.size(); ++i) dx.v[i] += g.v[i] * s.v[i] * (1.0 - s.v[i]);
  };
  return out_v;
}

Val Tape::softmax_time(Val xv) {
  check(xv);
  const Tensor2D &x = value(xv);
  if (x.cols != 1) throw ShapeError("softmax_time: expects a single channel");
  const int rows = x.rows;
  double mx = x.v[0];
  for (double e : x.v) mx = std::max(mx, e);
  Tensor2D out(rows, 1);
  double sum = 0.0;
  for (int t = 0; t < rows; ++t) {
    out.v[t] = std::exp(x.v[t] - mx);
    sum += out.v[t];
  }
  for (int t = 0; t < rows; ++t) out.v[t] /= sum;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, xid = xv.id;
  nodes_[oid].back = [xid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &p = tp.nodes_[oid].value;
    Tensor2D &dx = tp.nodes_[xid].grad;
    double dot = 0.0;
    for (size_t t = 0; t < p.v.size(); ++t) dot += g.v[t] * p.v[t];
    for (size_t t = 0; t < p.v.size(); ++t) dx.v[t] += p.v[t] * (g.v[t] - dot);
  };
  return out_v;
}

Val Tape::concat_cols(const std::vector<Val> &xs) {
  if (xs.empty()) throw UsageError("concat_cols: empty input list");
  for (Val v : xs) check(v);
  const int rows = value(xs[0]).rows;
  int total = 0;
  for (Val v : xs) {
    if (value(v).rows != rows) throw DataError("concat_cols: sequence length mismatch");
    total += value(v).cols;
  }
  Tensor2D out(rows, total);
  int off = 0;
  for (Val v : xs) {
    const Tensor2D &x = value(v);
    for (int t = 0; t < rows; ++t)
      std::copy(x.row(t), x.row(t) + x.cols, out.row(t) + off);
    off += x.cols;
  }
  std::vector<int> ids;
  for (Val v : xs) ids.push_back(v.id);
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id;
  nodes_[oid].back = [ids, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    int off = 0;
    for (int id : ids) {
      Tensor2D &dx = tp.nodes_[id].grad;
      for (int t = 0; t < dx.rows; ++t) {
        const double *grow = g.row(t) + off;
        double *dxrow = dx.row(t);
        for (int c = 0; c < dx.cols; ++c) dxrow[c] += grow[c];
      }
      off += dx.cols;
    }
  };
  return out_v;
}

Val Tape::shift_down(Val xv) {
  check(xv);
  const Tensor2D &x = value(xv);
  Tensor2D out(x.rows, x.cols);
  for (int t = 1; t < x.rows; ++t)
    std::copy(x.row(t - 1), x.row(t - 1) + x.cols, out.row(t));
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, xid = xv.id;
  nodes_[oid].back = [xid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    Tensor2D &dx = tp.nodes_[xid].grad;
    for (int t = 1; t < g.rows; ++t) {
      const double *grow = g.row(t);
      double *dxrow = dx.row(t - 1);
      for (int c = 0; c < g.cols; ++c) dxrow[c] += grow[c];
    }
  };
  return out_v;
}

namespace {
void require_same_shape(const Tensor2D &a, const Tensor2D &b, const char *op) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch");
}
}  // namespace

Val Tape::add(Val a, Val b) {
  check(a), check(b);
  require_same_shape(value(a), value(b), "add");
  Tensor2D out = value(a);
  const Tensor2D &bt = value(b);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += bt.v[i];
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id, bid = b.id;
  nodes_[oid].back = [aid, bid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    tp.nodes_[aid].grad.add_scaled(g, 1.0);
    tp.nodes_[bid].grad.add_scaled(g, 1.0);
  };
  return out_v;
}

Val Tape::sub(Val a, Val b) {
  check(a), check(b);
  require_same_shape(value(a), value(b), "sub");
  Tensor2D out = value(a);
  const Tensor2D &bt = value(b);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= bt.v[i];
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id, bid = b.id;
  nodes_[oid].back = [aid, bid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    tp.nodes_[aid].grad.add_scaled(g, 1.0);
    tp.nodes_[bid].grad.add_scaled(g, -1.0);
  };
  return out_v;
}

Val Tape::mul(Val a, Val b) {
  check(a), check(b);
  require_same_shape(value(a), value(b), "mul");
  Tensor2D out = value(a);
  const Tensor2D &bt = value(b);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= bt.v[i];
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id, bid = b.id;
  nodes_[oid].back = [aid, bid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &av = tp.nodes_[aid].value;
    const Tensor2D &bv = tp.nodes_[bid].value;
    Tensor2D &da = tp.nodes_[aid].grad;
    Tensor2D &db = tp.nodes_[bid].grad;
    for (size_t i = 0; i < g.v.size(); ++i) {
      da.v[i] += g.v[i] * bv.v[i];
      db.v[i] += g.v[i] * av.v[i];
    }
  };
  return out_v;
}

Val Tape::scale(Val a, double c) {
  check(a);
  Tensor2D out = value(a);
  for (double &e : out.v) e *= c;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id;
  nodes_[oid].back = [aid, oid, c](Tape &tp) {
    tp.nodes_[aid].grad.add_scaled(tp.nodes_[oid].grad, c);
  };
  return out_v;
}

Val Tape::add_const(Val a, double c) {
  check(a);
  Tensor2D out = value(a);
  for (double &e : out.v) e += c;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id;
  nodes_[oid].back = [aid, oid](Tape &tp) {
    tp.nodes_[aid].grad.add_scaled(tp.nodes_[oid].grad, 1.0);
  };
  return out_v;
}

Val Tape::square(Val a) {
  check(a);
  Tensor2D out = value(a);
  for (double &e : out.v) e *= e;
  Val out_v = push(std::move(out), nullptr);
  const int oid = out_v.id, aid = a.id;
  nodes_[oid].back = [aid, oid](Tape &tp) {
    const Tensor2D &g = tp.nodes_[oid].grad;
    const Tensor2D &x = tp.nodes_[aid].value;
    Tensor2D &dx = tp.nodes_[aid].grad;
    for (size_t i = 0; i < g.v.size(); ++i) dx.v[i] += 2.0 * x.v[i] * g.v[i];
  };
  return out_v;
}

Val Tape::sum_all(Val a) {
  check(a);
  double s = 0.0;
  for (double e : value(a).v) s += e;
  Val out_v = push(Tensor2D::full(1, 1, s), nullptr);
  const int oid = out_v.id, aid = a.id;
  nodes_[oid].back = [aid, oid](Tape &tp) {
    const double g = tp.nodes_[oid].grad.v[0];
    for (double &e : tp.nodes_[aid].grad.v) e += g;
  };
  return out_v;
}

Val Tape::dot_all(Val a, Val b) {
  check(a), check(b);
  require_same_shape(value(a), value(b), "dot_all");
  const Tensor2D &av = value(a);
  const Tensor2D &bv = value(b);
  double s = 0.0;
  for (size_t i = 0; i < av.v.size(); ++i) s += av.v[i] * bv.v[i];
  Val out_v = push(Tensor2D::full(1, 1, s), nullptr);
  const int oid = out_v.id, aid = a.id, bid = b.id;
  nodes_[oid].back = [aid, bid, oid](Tape &tp) {
    const double g = tp.nodes_[oid].grad.v[0];
    tp.nodes_[aid].grad.add_scaled(tp.nodes_[bid].value, g);
    tp.nodes_[bid].grad.add_scaled(tp.nodes_[aid].value, g);
  };
  return out_v;
}

Val Tape::squared_error(Val pred, double target) {
  check(pred);
  const Tensor2D &q = value(pred);
  if (q.rows != 1 || q.cols != 1) throw UsageError("squared_error: prediction must be scalar");
  const double d = target - q.v[0];
  Val out_v = push(Tensor2D::full(1, 1, d * d), nullptr);
  const int oid = out_v.id, qid = pred.id;
  nodes_[oid].back = [qid, oid, target](Tape &tp) {
    const double g = tp.nodes_[oid].grad.v[0];
    tp.nodes_[qid].grad.v[0] += g * 2.0 * (tp.nodes_[qid].value.v[0] - target);
  };
  return out_v;
}

Val Tape::contrastive(Val pred, Val target, int halfwidth) {
  check(pred), check(target);
  const Tensor2D &f = value(pred);
  const Tensor2D &x = value(target);
  require_same_shape(f, x, "contrastive");
  if (halfwidth < 1)
    throw ConfigError("contrastive: neighborhood halfwidth must be at least 1");

  const int rows = f.rows, d = f.cols;
  double loss = 0.0;
  std::vector<double> scores(static_cast<size_t>(2 * halfwidth + 1));
  for (int i = 1; i < rows; ++i) {
    const int lo = std::max(0, i - halfwidth);
    const int hi = std::min(rows - 1, i + halfwidth);
    const double *frow = f.row(i);
    double mx = -1e300;
    for (int j = lo; j <= hi; ++j) {
      const double *xrow = x.row(j);
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += frow[c] * xrow[c];
      scores[j - lo] = s;
      mx = std::max(mx, s);
    }
    double denom = 0.0;
    for (int j = lo; j <= hi; ++j) denom += std::exp(scores[j - lo] - mx);
    loss += mx + std::log(denom) - scores[i - lo];
  }

  Val out_v = push(Tensor2D::full(1, 1, loss), nullptr);
  const int oid = out_v.id, fid = pred.id, xid = target.id;
  nodes_[oid].back = [fid, xid, oid, halfwidth](Tape &tp) {
    const double g = tp.nodes_[oid].grad.v[0];
    const Tensor2D &f = tp.nodes_[fid].value;
    const Tensor2D &x = tp.nodes_[xid].value;
    Tensor2D &df = tp.nodes_[fid].grad;
    Tensor2D &dx = tp.nodes_[xid].grad;
    const int rows = f.rows, d = f.cols;
    std::vector<double> p(static_cast<size_t>(2 * halfwidth + 1));
    for (int i = 1; i < rows; ++i) {
      const int lo = std::max(0, i - halfwidth);
      const int hi = std::min(rows - 1, i + halfwidth);
      const double *frow = f.row(i);
      double mx = -1e300;
      for (int j = lo; j <= hi; ++j) {
        const double *xrow = x.row(j);
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += frow[c] * xrow[c];
        p[j - lo] = s;
        mx = std::max(mx, s);
      }
      double denom = 0.0;
      for (int j = lo; j <= hi; ++j) {
        p[j - lo] = std::exp(p[j - lo] - mx);
        denom += p[j - lo];
      }
      double *dfrow = df.row(i);
      for (int j = lo; j <= hi; ++j) {
        const double coeff = g * (p[j - lo] / denom - (j == i ? 1.0 : 0.0));
        const double *xrow = x.row(j);
        double *dxrow = dx.row(j);
        for (int c = 0; c < d; ++c) {
          dfrow[c] += coeff * xrow[c];
          dxrow[c] += coeff * frow[c];
        }
      }
    }
  };
  return out_v;
}

void Tape::backward(Val loss) {
  check(loss);
  if (swept_) throw UsageError("backward: tape already swept");
  const Tensor2D &l = value(loss);
  if (l.rows != 1 || l.cols != 1) throw UsageError("backward: loss must be a scalar");
  swept_ = true;
  nodes_[loss.id].grad.v[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(*this);
    if (nodes_[i].bound) {
      nodes_[i].bound->grad.add_scaled(nodes_[i].grad, 1.0);
      nodes_[i].bound->grad_set = true;
    }
  }
}

}  // namespace umsa
