#include <doctest.h>

#include <cmath>

#include "hgrec/adam.hpp"
#include "hgrec/autograd.hpp"
#include "hgrec/rng.hpp"
#include "hgrec/tensor.hpp"

using namespace hgrec;

namespace {

Tensor random_tensor(Rng& rng, int r, int c, double scale = 1.0) {
  Tensor t(r, c);
  for (double& x : t.v) x = rng.uniform(-scale, scale);
  return t;
}

}  // namespace

TEST_CASE("masked_softmax equal logits over full support") {
  Tape tape;
  VarId l = tape.constant(Tensor::from_rows({{2.0, 2.0}}));
  VarId p = tape.masked_softmax(l, Tensor::from_rows({{1.0, 1.0}}));
  CHECK(tape.value(p).at(0, 0) == doctest::Approx(0.5));
  CHECK(tape.value(p).at(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("masked_softmax single unmasked entry wins regardless of logit") {
  Tape tape;
  VarId l = tape.constant(Tensor::from_rows({{5.0, -1e300}}));
  VarId p = tape.masked_softmax(l, Tensor::from_rows({{1.0, 0.0}}));
  CHECK(tape.value(p).at(0, 0) == 1.0);
  CHECK(tape.value(p).at(0, 1) == 0.0);
}

TEST_CASE("masked_softmax rows sum to one and masked entries are exact zeros") {
  Rng rng(7);
  Tape tape;
  Tensor logits = random_tensor(rng, 8, 6, 30.0);
  Tensor mask(8, 6);
  for (int i = 0; i < 8; ++i) {
    mask.at(i, i % 6) = 1.0;  // guarantee support
    for (int j = 0; j < 6; ++j)
      if (rng.uniform() < 0.5) mask.at(i, j) = 1.0;
  }
  VarId p = tape.masked_softmax(tape.constant(logits), mask);
  for (int i = 0; i < 8; ++i) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j) {
      if (mask.at(i, j) == 0.0) CHECK(tape.value(p).at(i, j) == 0.0);
      s += tape.value(p).at(i, j);
    }
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("masked_softmax rejects an all-masked row") {
  Tape tape;
  VarId l = tape.constant(Tensor::from_rows({{1.0, 2.0}}));
  CHECK_THROWS_AS(tape.masked_softmax(l, Tensor::from_rows({{0.0, 0.0}})), NumericsError);
}

TEST_CASE("leaky_relu definition at negative input") {
  Tape tape;
  VarId y = tape.leaky_relu(tape.constant(Tensor::from_rows({{-1.0}})), 0.2);
  CHECK(tape.value(y).at(0, 0) == doctest::Approx(-0.2));
}

TEST_CASE("backward of sum(W x) puts x into every row of grad W") {
  Parameter W("W", Tensor::from_rows({{1.0, 2.0}, {3.0, 4.0}, {0.5, -1.0}}));
  Tensor x = Tensor::from_rows({{2.0}, {-3.0}});
  Tape tape;
  VarId loss = tape.sum_all(tape.matmul(tape.param(W), tape.constant(x)));
  tape.backward(loss);
  for (int i = 0; i < 3; ++i) {
    CHECK(W.grad.at(i, 0) == doctest::Approx(2.0));
    CHECK(W.grad.at(i, 1) == doctest::Approx(-3.0));
  }
}

TEST_CASE("gradient through a zero scale is zero") {
  Parameter w("w", Tensor::from_rows({{0.3}}));
  Tape tape;
  VarId loss = tape.scale(tape.sigmoid_op(tape.param(w)), 0.0);
  tape.backward(loss);
  CHECK(w.grad.at(0, 0) == 0.0);
}

TEST_CASE("backward is linear: grads of f+g equal grads of f plus grads of g") {
  Rng rng(11);
  Parameter A("A", random_tensor(rng, 3, 4));
  Parameter B("B", random_tensor(rng, 4, 2));
  Tensor x = random_tensor(rng, 2, 3);

  auto f_loss = [&](Tape& t) {
    return t.sum_all(t.tanh_op(t.matmul(t.param(A), t.param(B))));
  };
  auto g_loss = [&](Tape& t) {
    return t.sum_all(t.sigmoid_op(t.matmul(t.constant(x), t.param(A))));
  };

  A.zero_grad();
  B.zero_grad();
  {
    Tape t;
    t.backward(t.add(f_loss(t), g_loss(t)));
  }
  Tensor ga_sum = A.grad, gb_sum = B.grad;

  A.zero_grad();
  B.zero_grad();
  {
    Tape t;
    t.backward(f_loss(t));
  }
  {
    Tape t;
    t.backward(g_loss(t));
  }
  for (int k = 0; k < ga_sum.size(); ++k)
    CHECK(ga_sum.v[k] == doctest::Approx(A.grad.v[k]).epsilon(1e-12));
  for (int k = 0; k < gb_sum.size(); ++k)
    CHECK(gb_sum.v[k] == doctest::Approx(B.grad.v[k]).epsilon(1e-12));
}

TEST_CASE("non-finite forward value trips an error") {
  Tape tape;
  VarId big = tape.constant(Tensor::from_rows({{1e308}}));
  CHECK_THROWS_AS(tape.exp_op(big), NumericsError);
}

TEST_CASE("backward rejects non-scalar loss and double sweeps") {
  Parameter W("W", Tensor::from_rows({{1.0, 2.0}}));
  Tape tape;
  VarId y = tape.param(W);
  CHECK_THROWS_AS(tape.backward(y), NumericsError);

  Tape t2;
  VarId loss = t2.sum_all(t2.param(W));
  t2.backward(loss);
  CHECK_THROWS_AS(t2.backward(loss), NumericsError);
}

TEST_CASE("backward on an empty tape is an error") {
  Tape tape;
  CHECK_THROWS_AS(tape.backward(0), NumericsError);
}

TEST_CASE("sparse masked attention matches dense masked softmax") {
  Rng rng(23);
  const int n = 12;
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i == j || rng.uniform() < 0.3) rows[i].push_back(j);
  }
  SparseMask mask = SparseMask::from_rows(n, rows);
  Tensor f = random_tensor(rng, n, 1), g = random_tensor(rng, n, 1);
  const double slope = 0.2;

  Tape tape;
  VarId alpha = tape.masked_attention(tape.constant(f), tape.constant(g), mask, slope);

  // dense route: logits_ij = leaky_relu(f_i + g_j), same mask
  Tensor logits(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = f.v[i] + g.v[j];
      logits.at(i, j) = x > 0 ? x : slope * x;
    }
  Tape t2;
  VarId dense = t2.masked_softmax(t2.constant(logits), mask.to_dense());

  for (int i = 0; i < n; ++i) {
    auto js = mask.row(i);
    for (size_t k = 0; k < js.size(); ++k) {
      CHECK(tape.value(alpha).v[mask.row_ptr[i] + k] ==
            doctest::Approx(t2.value(dense).at(i, js[k])).epsilon(1e-12));
    }
  }
}

TEST_CASE("spmm with attention values matches dense matmul") {
  Rng rng(31);
  const int n = 9, d = 5;
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || rng.uniform() < 0.4) rows[i].push_back(j);
  SparseMask mask = SparseMask::from_rows(n, rows);
  Tensor vals(mask.nnz(), 1);
  for (double& x : vals.v) x = rng.uniform(-1, 1);
  Tensor X = random_tensor(rng, n, d);

  Tape tape;
  VarId out = tape.spmm(mask, tape.constant(vals), tape.constant(X));

  Tensor dense(n, n);
  for (int i = 0; i < n; ++i) {
    auto js = mask.row(i);
    for (size_t k = 0; k < js.size(); ++k) dense.at(i, js[k]) = vals.v[mask.row_ptr[i] + k];
  }
  Tape t2;
  VarId ref = t2.matmul(t2.constant(dense), t2.constant(X));
  for (int k = 0; k < n * d; ++k)
    CHECK(tape.value(out).v[k] == doctest::Approx(t2.value(ref).v[k]).epsilon(1e-12));
}

TEST_CASE("concat and transpose round values through correctly") {
  Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  Tensor b = Tensor::from_rows({{5}, {6}});
  Tape tape;
  VarId cc = tape.concat_cols({tape.constant(a), tape.constant(b)});
  CHECK(tape.value(cc).at(0, 2) == 5);
  CHECK(tape.value(cc).at(1, 2) == 6);
  VarId cr = tape.concat_rows({tape.constant(b), tape.constant(b)});
  CHECK(tape.value(cr).rows == 4);
  VarId tr = tape.transpose(tape.constant(a));
  CHECK(tape.value(tr).at(0, 1) == 3);
}

TEST_CASE("bce objective on chance-level probabilities is ln 2") {
  Tape tape;
  VarId pos = tape.constant(Tensor::from_rows({{0.5}}));
  VarId neg = tape.constant(Tensor::from_rows({{0.5}}));
  VarId loss = tape.bce_from_probs(pos, neg);
  CHECK(std::fabs(tape.value(loss).v[0] - std::log(2.0)) < 1e-12);
}

TEST_CASE("bce objective stays finite for saturated probabilities") {
  Tape tape;
  VarId pos = tape.constant(Tensor::from_rows({{1.0}, {0.0}}));
  VarId neg = tape.constant(Tensor::from_rows({{1.0}, {0.0}}));
  VarId loss = tape.bce_from_probs(pos, neg);
  CHECK(std::isfinite(tape.value(loss).v[0]));
}

TEST_CASE("bce objective worked example") {
  // -(ln .9 + ln .8 + ln .8)/3
  Tape tape;
  VarId pos = tape.constant(Tensor::from_rows({{0.9}, {0.8}}));
  VarId neg = tape.constant(Tensor::from_rows({{0.2}}));
  VarId loss = tape.bce_from_probs(pos, neg);
  const double expect = -(std::log(0.9) + std::log(0.8) + std::log(0.8)) / 3.0;
  CHECK(tape.value(loss).v[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("row_mean averages rows") {
  Tape tape;
  VarId m = tape.row_mean(tape.constant(Tensor::from_rows({{1.0, 4.0}, {3.0, 0.0}})));
  CHECK(tape.value(m).at(0, 0) == doctest::Approx(2.0));
  CHECK(tape.value(m).at(0, 1) == doctest::Approx(2.0));
}
