#include <doctest.h>

#include <cmath>

#include "hgrec/adam.hpp"
#include "hgrec/autograd.hpp"
#include "hgrec/gradcheck.hpp"
#include "hgrec/rng.hpp"

using namespace hgrec;

TEST_CASE("adam leaves parameters unchanged on zero gradient") {
  Parameter w("w", Tensor::from_rows({{0.7, -0.2}}));
  Tensor before = w.value;
  std::vector<Parameter*> ps{&w};
  adam_step(ps, {});
  CHECK(w.value == before);
}

TEST_CASE("adam with lr 0 is the identity") {
  Parameter w("w", Tensor::from_rows({{0.7, -0.2}}));
  w.grad = Tensor::from_rows({{1.3, -2.4}});
  Tensor before = w.value;
  AdamConfig cfg;
  cfg.lr = 0.0;
  std::vector<Parameter*> ps{&w};
  adam_step(ps, cfg);
  CHECK(w.value == before);
  CHECK(w.grad.at(0, 0) == 0.0);  // gradients cleared after the step
}

TEST_CASE("adam under a constant gradient steps by -sign(g) * lr in the limit") {
  Parameter w("w", Tensor::from_rows({{0.0, 0.0}}));
  AdamConfig cfg;
  cfg.lr = 0.01;
  std::vector<Parameter*> ps{&w};
  double prev0 = 0.0, prev1 = 0.0;
  for (int t = 0; t < 200; ++t) {
    prev0 = w.value.at(0, 0);
    prev1 = w.value.at(0, 1);
    w.grad = Tensor::from_rows({{2.5, -0.3}});
    adam_step(ps, cfg);
  }
  CHECK(w.value.at(0, 0) - prev0 == doctest::Approx(-cfg.lr).epsilon(1e-3));
  CHECK(w.value.at(0, 1) - prev1 == doctest::Approx(cfg.lr).epsilon(1e-3));
}

TEST_CASE("adam drives a quadratic bowl to the origin") {
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    Tensor start(1, 8);
    for (double& x : start.v) x = rng.uniform(-1.0, 1.0);
    Parameter w("w", start);
    std::vector<Parameter*> ps{&w};
    AdamConfig cfg;
    cfg.lr = 0.05;
    for (int t = 0; t < 200; ++t) {
      Tape tape;
      VarId wv = tape.param(w);
      VarId loss = tape.matmul(wv, tape.transpose(wv));
      tape.backward(loss);
      adam_step(ps, cfg);
    }
    double norm = 0.0;
    for (double x : w.value.v) norm += x * x;
    CHECK(std::sqrt(norm) < 1e-2);
  }
}

TEST_CASE("grad_check validates a small composite expression") {
  Rng rng(17);
  Tensor w0(4, 3), b0(1, 4);
  for (double& x : w0.v) x = rng.uniform(-0.8, 0.8);
  for (double& x : b0.v) x = rng.uniform(-0.5, 0.5);
  Parameter W("W", w0), b("b", b0);
  Tensor x(3, 5);
  for (double& e : x.v) e = rng.uniform(-1.0, 1.0);

  std::vector<Parameter*> ps{&W, &b};
  auto loss = [&]() {
    Tape t;
    VarId h = t.tanh_op(t.matmul(t.param(W), t.constant(x)));     // 4x5
    VarId s = t.add_rowvec(t.transpose(h), t.param(b));           // 5x4
    VarId l = t.sum_all(t.sigmoid_op(s));
    t.backward(l);
    return t.value(l).v[0];
  };
  auto rep = grad_check(loss, ps, 1e-6);
  CHECK(rep.coords_checked == 16);
  CHECK(rep.max_rel_err < 1e-6);
}

TEST_CASE("grad_check covers elementwise ops, slicing and scalar scaling") {
  Rng rng(23);
  Tensor a0(3, 4), b0(3, 4), s0(1, 1);
  for (double& x : a0.v) x = rng.uniform(-1, 1);
  for (double& x : b0.v) x = rng.uniform(-1, 1);
  s0.v[0] = 0.7;
  Parameter A("A", a0), B("B", b0), S("S", s0);
  std::vector<Parameter*> ps{&A, &B, &S};
  auto loss = [&]() {
    Tape t;
    VarId prod = t.elementwise_mul(t.param(A), t.param(B));
    VarId e = t.exp_op(t.scale(prod, 0.3));
    VarId sliced = t.slice_rows(e, 1, 3);
    VarId scaled = t.scalar_mul(t.param(S), sliced);
    VarId l = t.add(t.sum_all(scaled), t.element(e, 0, 2));
    t.backward(l);
    return t.value(l).v[0];
  };
  auto rep = grad_check(loss, ps, 1e-6);
  CHECK(rep.coords_checked == 25);
  CHECK(rep.max_rel_err < 1e-6);
}

TEST_CASE("grad_check covers masked attention and spmm") {
  Rng rng(29);
  const int n = 6, d = 3, dp = 2;
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || rng.uniform() < 0.4) rows[i].push_back(j);
  SparseMask mask = SparseMask::from_rows(n, rows);

  Tensor h(n, d);
  for (double& e : h.v) e = rng.uniform(-1.0, 1.0);
  Tensor w0(dp, d), a0(2 * dp, 1);
  for (double& e : w0.v) e = rng.uniform(-0.9, 0.9);
  for (double& e : a0.v) e = rng.uniform(-0.9, 0.9);
  Parameter W("W", w0), a("a", a0);
  std::vector<Parameter*> ps{&W, &a};

  auto loss = [&]() {
    Tape t;
    VarId hw = t.matmul(t.constant(h), t.transpose(t.param(W)));  // n x dp
    VarId av = t.param(a);
    VarId al = t.constant(Tensor::zeros(dp, 1));
    // split a into left/right halves via elementwise masks
    Tensor sel_l(2 * dp, dp), sel_r(2 * dp, dp);
    for (int k = 0; k < dp; ++k) {
      sel_l.at(k, k) = 1.0;
      sel_r.at(dp + k, k) = 1.0;
    }
    VarId f = t.matmul(hw, t.matmul(t.transpose(t.constant(sel_l)), av));  // n x 1
    VarId g = t.matmul(hw, t.matmul(t.transpose(t.constant(sel_r)), av));
    (void)al;
    VarId alpha = t.masked_attention(f, g, mask, 0.2);
    VarId out = t.leaky_relu(t.spmm(mask, alpha, hw), 0.2);
    VarId l = t.sum_all(t.tanh_op(out));
    t.backward(l);
    return t.value(l).v[0];
  };
  auto rep = grad_check(loss, ps, 1e-6);
  CHECK(rep.max_rel_err < 1e-5);
}
