#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "testutil.hpp"
#include "umsa/errors.hpp"
#include "umsa/optim.hpp"
#include "umsa/rng.hpp"
#include "umsa/tape.hpp"

using namespace umsa;
using testutil::random_tensor;

TEST_CASE("rng: identical seed gives identical cross-platform stream") {
  Rng a(0);
  CHECK(a.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(a.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(a.next_u64() == 0x06c45d188009454full);
  Rng b(42), c(42);
  for (int i = 0; i < 100; ++i) CHECK(b.next_u64() == c.next_u64());
  CHECK(Rng(42).next_u64() == 0xbdd732262feb6e95ull);
  Rng d = Rng::derive(42, "one"), e = Rng::derive(42, "two");
  CHECK(d.next_u64() != e.next_u64());
  for (int i = 0; i < 100; ++i) {
    const double u = Rng(7).uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("temporal_conv: identity 1xD kernel is the identity map exactly") {
  Rng rng(1);
  Tensor2D x = random_tensor(9, 4, rng, -3.0, 3.0);
  Tape t;
  Val out = t.temporal_conv(t.leaf(x), t.leaf(Tensor2D::identity(4)),
                            t.leaf(Tensor2D::zeros(1, 4)), 1);
  const Tensor2D &o = t.value(out);
  REQUIRE(o.same_shape(x));
  CHECK(std::memcmp(o.v.data(), x.v.data(), x.v.size() * sizeof(double)) == 0);
}

TEST_CASE("temporal_conv: zero input yields bias rows") {
  Tape t;
  Rng rng(2);
  Tensor2D kernel = random_tensor(3 * 2, 3, rng);
  Tensor2D bias = Tensor2D::from({{0.5, -1.0, 2.0}});
  Val out = t.temporal_conv(t.leaf(Tensor2D::zeros(5, 2)), t.leaf(kernel), t.leaf(bias), 1);
  for (int i = 0; i < 5; ++i) {
    CHECK(t.value(out).at(i, 0) == 0.5);
    CHECK(t.value(out).at(i, 1) == -1.0);
    CHECK(t.value(out).at(i, 2) == 2.0);
  }
}

TEST_CASE("temporal_conv: hand example 1,2,3,4 * [1,1,1] -> 3,6,9,7") {
  Tape t;
  Val out = t.temporal_conv(t.leaf(Tensor2D::column({1, 2, 3, 4})),
                            t.leaf(Tensor2D::from({{1.0}, {1.0}, {1.0}})),
                            t.leaf(Tensor2D::zeros(1, 1)), 1);
  CHECK(t.value(out).v == std::vector<double>{3, 6, 9, 7});
}

TEST_CASE("temporal_conv: matches the sliding-window oracle on random configs") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const int rows = static_cast<int>(rng.uniform_int(1, 12));
    const int din = static_cast<int>(rng.uniform_int(1, 4));
    const int dout = static_cast<int>(rng.uniform_int(1, 4));
    const int k = 2 * static_cast<int>(rng.uniform_int(0, 2)) + 1;
    const int dil = static_cast<int>(rng.uniform_int(1, 3));
    Tensor2D x = random_tensor(rows, din, rng);
    Tensor2D w = random_tensor(k * din, dout, rng);
    Tensor2D b = random_tensor(1, dout, rng);
    Tape t;
    Val out = t.temporal_conv(t.leaf(x), t.leaf(w), t.leaf(b), dil);
    const Tensor2D expect = testutil::oracle_conv(x, w, b, k, dil);
    CHECK(t.value(out).max_abs_diff(expect) < 1e-12);
  }
}

TEST_CASE("temporal_conv: rejects bad shapes and even kernels") {
  Tape t;
  Val x = t.leaf(Tensor2D::zeros(4, 3));
  CHECK_THROWS_AS(t.temporal_conv(x, t.leaf(Tensor2D::zeros(4, 2)),
                                  t.leaf(Tensor2D::zeros(1, 2)), 1),
                  ShapeError);
  CHECK_THROWS_AS(t.temporal_conv(x, t.leaf(Tensor2D::zeros(2 * 3, 2)),
                                  t.leaf(Tensor2D::zeros(1, 2)), 1),
                  UsageError);
}

TEST_CASE("affine: identity, zero input, and the 2x2 hand example") {
  Rng rng(4);
  Tensor2D x = random_tensor(6, 3, rng);
  {
    Tape t;
    Val out = t.affine(t.leaf(x), t.leaf(Tensor2D::identity(3)), t.leaf(Tensor2D::zeros(1, 3)));
    CHECK(t.value(out).max_abs_diff(x) == 0.0);
  }
  {
    Tape t;
    Val out = t.affine(t.leaf(Tensor2D::zeros(4, 2)),
                       t.leaf(random_tensor(2, 3, rng)),
                       t.leaf(Tensor2D::from({{7.0, 8.0, 9.0}})));
    for (int i = 0; i < 4; ++i) {
      CHECK(t.value(out).at(i, 0) == 7.0);
      CHECK(t.value(out).at(i, 2) == 9.0);
    }
  }
  {
    Tape t;
    Val out = t.affine(t.leaf(Tensor2D::from({{1, 2}, {3, 4}})),
                       t.leaf(Tensor2D::from({{1.0}, {1.0}})),
                       t.leaf(Tensor2D::zeros(1, 1)));
    CHECK(t.value(out).v == std::vector<double>{3, 7});
  }
  Tape t;
  CHECK_THROWS_AS(t.affine(t.leaf(Tensor2D::zeros(2, 3)), t.leaf(Tensor2D::zeros(2, 2)),
                           t.leaf(Tensor2D::zeros(1, 2))),
                  ShapeError);
}

TEST_CASE("relu") {
  Tape t;
  Val out = t.relu(t.leaf(Tensor2D::from({{-1.0, 0.0, 2.0}})));
  CHECK(t.value(out).v == std::vector<double>{0.0, 0.0, 2.0});
  Rng rng(5);
  Tensor2D pos = random_tensor(3, 3, rng, 0.0, 5.0);
  Tape t2;
  CHECK(t2.value(t2.relu(t2.leaf(pos))).max_abs_diff(pos) == 0.0);
  Tensor2D neg = random_tensor(3, 3, rng, -5.0, -0.001);
  Tape t3;
  for (double e : t3.value(t3.relu(t3.leaf(neg))).v) CHECK(e == 0.0);
}

TEST_CASE("softmax_time: uniform, shift invariance, closed form") {
  {
    Tape t;
    Val out = t.softmax_time(t.leaf(Tensor2D::full(5, 1, 3.7)));
    for (double e : t.value(out).v) CHECK(e == doctest::Approx(0.2).epsilon(1e-12));
  }
  {
    Rng rng(6);
    Tensor2D x = random_tensor(11, 1, rng, -2.0, 2.0);
    Tensor2D xc = x;
    for (double &e : xc.v) e += 123.456;
    Tape t1, t2;
    const Tensor2D &a = t1.value(t1.softmax_time(t1.leaf(x)));
    const Tensor2D &b = t2.value(t2.softmax_time(t2.leaf(xc)));
    CHECK(a.max_abs_diff(b) < 1e-12);
  }
  {
    Tape t;
    Val out = t.softmax_time(t.leaf(Tensor2D::column({0.0, std::log(3.0)})));
    CHECK(t.value(out).v[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.value(out).v[1] == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("softmax_time: probability vector for magnitudes up to 1e3") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int rows = static_cast<int>(rng.uniform_int(1, 40));
    Tensor2D x = random_tensor(rows, 1, rng, -1e3, 1e3);
    Tape t;
    const Tensor2D &p = t.value(t.softmax_time(t.leaf(x)));
    double sum = 0.0;
    for (double e : p.v) {
      CHECK(e >= 0.0);
      sum += e;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("backward: sum gives all-ones gradient, squared error gives 2(x-y)") {
  {
    Rng rng(8);
    Tensor2D x = random_tensor(4, 3, rng);
    Tape t;
    Val xv = t.leaf(x);
    t.backward(t.sum_all(xv));
    for (double g : t.grad(xv).v) CHECK(g == 1.0);
  }
  {
    Tape t;
    Val x = t.leaf(Tensor2D::full(1, 1, 3.0));
    t.backward(t.squared_error(x, 1.0));
    CHECK(t.grad(x).v[0] == doctest::Approx(4.0).epsilon(1e-14));
  }
  {
    Tape t;
    Val x = t.leaf(Tensor2D::full(1, 1, 3.0));
    Val y = t.leaf(Tensor2D::full(1, 1, 1.0));
    t.backward(t.square(t.sub(x, y)));
    CHECK(t.grad(x).v[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(t.grad(y).v[0] == doctest::Approx(-4.0).epsilon(1e-14));
  }
  Tape t;
  Val x = t.leaf(Tensor2D::zeros(2, 2));
  CHECK_THROWS_AS(t.backward(x), UsageError);
}

TEST_CASE("backward: random three-layer composition matches finite differences") {
  Rng rng(9);
  Tensor2D x = random_tensor(6, 3, rng);
  Tensor2D w1 = random_tensor(3 * 3, 4, rng);
  Tensor2D b1 = random_tensor(1, 4, rng);
  Tensor2D w2 = random_tensor(4, 4, rng);
  Tensor2D b2 = random_tensor(1, 4, rng);
  Tensor2D w3 = random_tensor(4, 1, rng);
  Tensor2D b3 = random_tensor(1, 1, rng);
  Tensor2D proj = random_tensor(6, 1, rng);

  auto build2 = [&](Tape &t) -> testutil::BuiltGraph {
    Val xv = t.leaf(x);
    Val w1v = t.leaf(w1), b1v = t.leaf(b1);
    Val w2v = t.leaf(w2), b2v = t.leaf(b2);
    Val w3v = t.leaf(w3), b3v = t.leaf(b3);
    Val h = t.temporal_conv(xv, w1v, b1v, 1);
    h = t.relu(h);
    h = t.affine(h, w2v, b2v);
    h = t.sigmoid(h);
    h = t.affine(h, w3v, b3v);
    Val loss = t.dot_all(h, t.leaf(proj));
    return {loss, {xv, w1v, b1v, w2v, b2v, w3v, b3v}};
  };
  Rng coord_rng(10);
  const double err = testutil::max_fd_relerr({&x, &w1, &b1, &w2, &b2, &w3, &b3}, build2,
                                             50, coord_rng);
  CHECK(err < 1e-4);
}

TEST_CASE("contrastive: hand-computed two-term value and gradient check") {
  // F = [0, 2, 1], X = [1, 0, -1], K = 1
  Tensor2D f = Tensor2D::column({0.0, 2.0, 1.0});
  Tensor2D x = Tensor2D::column({1.0, 0.0, -1.0});
  const double term1 = -std::log(1.0 / (std::exp(2.0) + 1.0 + std::exp(-2.0)));
  const double term2 = -std::log(std::exp(-1.0) / (1.0 + std::exp(-1.0)));
  Tape t;
  Val loss = t.contrastive(t.leaf(f), t.leaf(x), 1);
  CHECK(t.value(loss).v[0] == doctest::Approx(term1 + term2).epsilon(1e-12));

  Rng rng(11);
  Tensor2D fr = random_tensor(7, 3, rng);
  Tensor2D xr = random_tensor(7, 3, rng);
  auto build = [&](Tape &tp) -> testutil::BuiltGraph {
    Val fv = tp.leaf(fr), xv = tp.leaf(xr);
    return {tp.contrastive(fv, xv, 2), {fv, xv}};
  };
  Rng coord_rng(12);
  CHECK(testutil::max_fd_relerr({&fr, &xr}, build, 60, coord_rng) < 1e-4);

  Tape t2;
  CHECK_THROWS_AS(t2.contrastive(t2.leaf(fr), t2.leaf(xr), 0), ConfigError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Param p("w", Tensor2D::full(2, 2, 1.5));
  p.grad_set = true;  // populated with zeros
  Adam opt({0.1, 0.9, 0.999, 1e-8});
  std::vector<Param *> ps{&p};
  for (int i = 0; i < 5; ++i) {
    opt.step(ps);
    p.grad_set = true;
  }
  for (double e : p.value.v) CHECK(e == 1.5);
}

TEST_CASE("adam: first step moves by ~lr*sign(g)") {
  Param p("w", Tensor2D::full(1, 1, 0.7));
  p.grad.v[0] = 3.0;
  p.grad_set = true;
  Adam opt({0.01, 0.9, 0.999, 1e-8});
  std::vector<Param *> ps{&p};
  opt.step(ps);
  CHECK(p.value.v[0] == doctest::Approx(0.7 - 0.01).epsilon(1e-8));
  CHECK(opt.step_count() == 1);
  CHECK_FALSE(p.grad_set);  // cleared
  CHECK_THROWS_AS(opt.step(ps), UsageError);  // missing gradient
}

TEST_CASE("adam: 200 steps on (w-2)^2 converge and match the scalar recurrence") {
  Param p("w", Tensor2D::zeros(1, 1));
  Adam opt({0.1, 0.9, 0.999, 1e-8});
  std::vector<Param *> ps{&p};
  for (int i = 0; i < 200; ++i) {
    Tape t;
    Val w = t.param(p);
    t.backward(t.squared_error(w, 2.0));
    opt.step(ps);
  }
  // independent scalar recurrence
  double w = 0.0, m = 0.0, v = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double g = 2.0 * (w - 2.0);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1.0 - std::pow(0.9, i));
    const double vhat = v / (1.0 - std::pow(0.999, i));
    w -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
  }
  CHECK(std::abs(w - 2.0) < 0.05);
  CHECK(p.value.v[0] == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("training determinism: same seed gives bitwise-identical parameters") {
  auto run = [](uint64_t seed) {
    Rng rng = Rng::derive(seed, "det");
    Param w("w", testutil::random_tensor(3, 2, rng));
    Param b("b", testutil::random_tensor(1, 2, rng));
    Tensor2D x = testutil::random_tensor(5, 3, rng);
    Adam opt({1e-2, 0.9, 0.999, 1e-8});
    std::vector<Param *> ps{&w, &b};
    for (int i = 0; i < 25; ++i) {
      Tape t;
      Val h = t.affine(t.leaf(x), t.param(w), t.param(b));
      t.backward(t.sum_all(t.square(h)));
      opt.step(ps);
    }
    std::vector<double> all = w.value.v;
    all.insert(all.end(), b.value.v.begin(), b.value.v.end());
    return all;
  };
  const auto a = run(33), b = run(33), c = run(34);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  CHECK(a != c);
}
