#include "hgrec/autograd.hpp"

#include <algorithm>
#include <cmath>

namespace hgrec {

namespace {

double stable_softmax_row(std::span<const double> e, std::span<double> out) {
  double mx = e[0];
  for (double x : e) mx = std::max(mx, x);
  double z = 0.0;
  for (size_t k = 0; k < e.size(); ++k) {
    out[k] = std::exp(e[k] - mx);
    z += out[k];
  }
  for (size_t k = 0; k < e.size(); ++k) out[k] /= z;
  return z;
}

}  // namespace

void Tape::check_id(VarId id, const char* op) const {
  if (id < 0 || id >= static_cast<VarId>(nodes_.size()))
    throw NumericsError(std::string(op) + ": variable id out of range");
}

VarId Tape::push(Tensor value, bool requires_grad,
                 std::function<void(Tape&, const Node&)> fn, const char* op) {
  if (!value.all_finite())
    throw NumericsError(std::string(op) + ": non-finite value produced");
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backprop = std::move(fn);
  nodes_.push_back(std::move(n));
  return static_cast<VarId>(nodes_.size() - 1);
}

void Tape::accumulate(VarId id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) n.grad = Tensor(n.value.rows, n.value.cols);
  for (int k = 0; k < g.size(); ++k) n.grad.v[k] += g.v[k];
}

void Tape::accumulate_at(VarId id, int r, int c, double g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) n.grad = Tensor(n.value.rows, n.value.cols);
  n.grad.at(r, c) += g;
}

const Tensor& Tape::grad_of(VarId id) const {
  check_id(id, "grad_of");
  return nodes_[id].grad;
}

VarId Tape::constant(Tensor t) { return push(std::move(t), false, nullptr, "constant"); }

VarId Tape::param(Parameter& p) {
  VarId id = push(p.value, true, nullptr, "param");
  nodes_[id].leaf = &p;
  return id;
}

VarId Tape::matmul(VarId a, VarId b) {
  check_id(a, "matmul");
  check_id(b, "matmul");
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (A.cols != B.rows)
    throw NumericsError("matmul: shape mismatch " + A.shape_str() + " * " + B.shape_str());
  Tensor out(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) out.at(i, j) += aik * B.at(k, j);
    }
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, const Node& self) {
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    const Tensor& G = self.grad;
    if (t.rg(a)) {
      Tensor ga(A.rows, A.cols);
      for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
          const double gij = G.at(i, j);
          if (gij == 0.0) continue;
          for (int k = 0; k < A.cols; ++k) ga.at(i, k) += gij * B.at(k, j);
        }
      t.accumulate(a, ga);
    }
    if (t.rg(b)) {
      Tensor gb(B.rows, B.cols);
      for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
          const double aik = A.at(i, k);
          if (aik == 0.0) continue;
          for (int j = 0; j < B.cols; ++j) gb.at(k, j) += aik * G.at(i, j);
        }
      t.accumulate(b, gb);
    }
  }, "matmul");
}

VarId Tape::transpose(VarId a) {
  check_id(a, "transpose");
  const Tensor& A = val(a);
  Tensor out(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(j, i) = A.at(i, j);
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    const Tensor& G = self.grad;
    Tensor ga(G.cols, G.rows);
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < G.cols; ++j) ga.at(j, i) = G.at(i, j);
    t.accumulate(a, ga);
  }, "transpose");
}

VarId Tape::add(VarId a, VarId b) {
  check_id(a, "add");
  check_id(b, "add");
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B))
    throw NumericsError("add: shape mismatch " + A.shape_str() + " + " + B.shape_str());
  Tensor out = A;
  for (int k = 0; k < out.size(); ++k) out.v[k] += B.v[k];
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, const Node& self) {
    t.accumulate(a, self.grad);
    t.accumulate(b, self.grad);
  }, "add");
}

VarId Tape::add_rowvec(VarId m, VarId r) {
  check_id(m, "add_rowvec");
  check_id(r, "add_rowvec");
  const Tensor& M = val(m);
  const Tensor& R = val(r);
  if (R.rows != 1 || R.cols != M.cols)
    throw NumericsError("add_rowvec: shape mismatch " + M.shape_str() + " + " + R.shape_str());
  Tensor out = M;
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) out.at(i, j) += R.at(0, j);
  return push(std::move(out), rg(m) || rg(r), [m, r](Tape& t, const Node& self) {
    const Tensor& G = self.grad;
    t.accumulate(m, G);
    if (t.rg(r)) {
      Tensor gr(1, G.cols);
      for (int i = 0; i < G.rows; ++i)
        for (int j = 0; j < G.cols; ++j) gr.at(0, j) += G.at(i, j);
      t.accumulate(r, gr);
    }
  }, "add_rowvec");
}

VarId Tape::concat_cols(const std::vector<VarId>& xs) {
  if (xs.empty()) throw NumericsError("concat_cols: empty input list");
  int total = 0;
  bool needs = false;
  for (VarId x : xs) {
    check_id(x, "concat_cols");
    if (val(x).rows != val(xs[0]).rows)
      throw NumericsError("concat_cols: row count mismatch");
    total += val(x).cols;
    needs = needs || rg(x);
  }
  Tensor out(val(xs[0]).rows, total);
  int off = 0;
  for (VarId x : xs) {
    const Tensor& X = val(x);
    for (int i = 0; i < X.rows; ++i)
      for (int j = 0; j < X.cols; ++j) out.at(i, off + j) = X.at(i, j);
    off += X.cols;
  }
  return push(std::move(out), needs, [xs](Tape& t, const Node& self) {
    const Tensor& G = self.grad;
    int off = 0;
    for (VarId x : xs) {
      const Tensor& X = t.val(x);
      if (t.rg(x)) {
        Tensor gx(X.rows, X.cols);
        for (int i = 0; i < X.rows; ++i)
          for (int j = 0; j < X.cols; ++j) gx.at(i, j) = G.at(i, off + j);
        t.accumulate(x, gx);
      }
      off += X.cols;
    }
  }, "concat_cols");
}

VarId Tape::concat_rows(const std::vector<VarId>& xs) {
  if (xs.empty()) throw NumericsError("concat_rows: empty input list");
  int total = 0;
  bool needs = false;
  for (VarId x : xs) {
    check_id(x, "concat_rows");
    if (val(x).cols != val(xs[0]).cols)
      throw NumericsError("concat_rows: column count mismatch");
    total += val(x).rows;
    needs = needs || rg(x);
  }
  Tensor out(total, val(xs[0]).cols);
  int off = 0;
  for (VarId x : xs) {
    const Tensor& X = val(x);
    for (int i = 0; i < X.rows; ++i)
      for (int j = 0; j < X.cols; ++j) out.at(off + i, j) = X.at(i, j);
    off += X.rows;
  }
  return push(std::move(out), needs, [xs](Tape& t, const Node& self) {
    const Tensor& G = self.grad;
    int off = 0;
    for (VarId x : xs) {
      const Tensor& X = t.val(x);
      if (t.rg(x)) {
        Tensor gx(X.rows, X.cols);
        for (int i = 0; i < X.rows; ++i)
          for (int j = 0; j < X.cols; ++j) gx.at(i, j) = G.at(off + i, j);
        t.accumulate(x, gx);
      }
      off += X.rows;
    }
  }, "concat_rows");
}

VarId Tape::leaky_relu(VarId a, double slope) {
  check_id(a, "leaky_relu");
  const Tensor& A = val(a);
  Tensor out = A;
  for (double& x : out.v) x = x > 0.0 ? x : slope * x;
  return push(std::move(out), rg(a), [a, slope](Tape& t, const Node& self) {
    const Tensor& A = t.val(a);
    Tensor ga(A.rows, A.cols);
    for (int k = 0; k < A.size(); ++k)
      ga.v[k] = self.grad.v[k] * (A.v[k] > 0.0 ? 1.0 : slope);
    t.accumulate(a, ga);
  }, "leaky_relu");
}

VarId Tape::tanh_op(VarId a) {
  check_id(a, "tanh");
  Tensor out = val(a);
  for (double& x : out.v) x = std::tanh(x);
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    Tensor ga(self.value.rows, self.value.cols);
    for (int k = 0; k < ga.size(); ++k)
      ga.v[k] = self.grad.v[k] * (1.0 - self.value.v[k] * self.value.v[k]);
    t.accumulate(a, ga);
  }, "tanh");
}

VarId Tape::sigmoid_op(VarId a) {
  check_id(a, "sigmoid");
  Tensor out = val(a);
  for (double& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    Tensor ga(self.value.rows, self.value.cols);
    for (int k = 0; k < ga.size(); ++k)
      ga.v[k] = self.grad.v[k] * self.value.v[k] * (1.0 - self.value.v[k]);
    t.accumulate(a, ga);
  }, "sigmoid");
}

VarId Tape::exp_op(VarId a) {
  check_id(a, "exp");
  Tensor out = val(a);
  for (double& x : out.v) x = std::exp(x);
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    Tensor ga(self.value.rows, self.value.cols);
    for (int k = 0; k < ga.size(); ++k) ga.v[k] = self.grad.v[k] * self.value.v[k];
    t.accumulate(a, ga);
  }, "exp");
}

VarId Tape::elementwise_mul(VarId a, VarId b) {
  check_id(a, "elementwise_mul");
  check_id(b, "elementwise_mul");
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B))
    throw NumericsError("elementwise_mul: shape mismatch " + A.shape_str() + " * " + B.shape_str());
  Tensor out = A;
  for (int k = 0; k < out.size(); ++k) out.v[k] *= B.v[k];
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, const Node& self) {
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    if (t.rg(a)) {
      Tensor ga(A.rows, A.cols);
      for (int k = 0; k < ga.size(); ++k) ga.v[k] = self.grad.v[k] * B.v[k];
      t.accumulate(a, ga);
    }
    if (t.rg(b)) {
      Tensor gb(B.rows, B.cols);
      for (int k = 0; k < gb.size(); ++k) gb.v[k] = self.grad.v[k] * A.v[k];
      t.accumulate(b, gb);
    }
  }, "elementwise_mul");
}

VarId Tape::scale(VarId a, double c) {
  check_id(a, "scale");
  Tensor out = val(a);
  for (double& x : out.v) x *= c;
  return push(std::move(out), rg(a), [a, c](Tape& t, const Node& self) {
    Tensor ga(self.value.rows, self.value.cols);
    for (int k = 0; k < ga.size(); ++k) ga.v[k] = self.grad.v[k] * c;
    t.accumulate(a, ga);
  }, "scale");
}

VarId Tape::scalar_mul(VarId s, VarId m) {
  check_id(s, "scalar_mul");
  check_id(m, "scalar_mul");
  const Tensor& S = val(s);
  if (S.rows != 1 || S.cols != 1) throw NumericsError("scalar_mul: scalar operand must be 1x1");
  const double c = S.v[0];
  Tensor out = val(m);
  for (double& x : out.v) x *= c;
  return push(std::move(out), rg(s) || rg(m), [s, m](Tape& t, const Node& self) {
    const double c = t.val(s).v[0];
    const Tensor& M = t.val(m);
    if (t.rg(s)) {
      double g = 0.0;
      for (int k = 0; k < M.size(); ++k) g += self.grad.v[k] * M.v[k];
      t.accumulate_at(s, 0, 0, g);
    }
    if (t.rg(m)) {
      Tensor gm(M.rows, M.cols);
      for (int k = 0; k < gm.size(); ++k) gm.v[k] = self.grad.v[k] * c;
      t.accumulate(m, gm);
    }
  }, "scalar_mul");
}

VarId Tape::row_mean(VarId a) {
  check_id(a, "row_mean");
  const Tensor& A = val(a);
  if (A.rows == 0) throw NumericsError("row_mean: zero rows");
  Tensor out(1, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(0, j) += A.at(i, j);
  for (double& x : out.v) x /= A.rows;
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    const Tensor& A = t.val(a);
    Tensor ga(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < A.cols; ++j) ga.at(i, j) = self.grad.at(0, j) / A.rows;
    t.accumulate(a, ga);
  }, "row_mean");
}

VarId Tape::sum_all(VarId a) {
  check_id(a, "sum_all");
  const Tensor& A = val(a);
  Tensor out(1, 1);
  for (double x : A.v) out.v[0] += x;
  return push(std::move(out), rg(a), [a](Tape& t, const Node& self) {
    const Tensor& A = t.val(a);
    Tensor ga = Tensor::full(A.rows, A.cols, self.grad.v[0]);
    t.accumulate(a, ga);
  }, "sum_all");
}

VarId Tape::element(VarId a, int i, int j) {
  check_id(a, "element");
  const Tensor& A = val(a);
  if (i < 0 || i >= A.rows || j < 0 || j >= A.cols)
    throw NumericsError("element: index out of range");
  Tensor out(1, 1);
  out.v[0] = A.at(i, j);
  return push(std::move(out), rg(a), [a, i, j](Tape& t, const Node& self) {
    t.accumulate_at(a, i, j, self.grad.v[0]);
  }, "element");
}

VarId Tape::slice_rows(VarId a, int r0, int r1) {
  check_id(a, "slice_rows");
  const Tensor& A = val(a);
  if (r0 < 0 || r1 > A.rows || r0 >= r1)
    throw NumericsError("slice_rows: bad row range [" + std::to_string(r0) + ", " +
                        std::to_string(r1) + ") for " + A.shape_str());
  Tensor out(r1 - r0, A.cols);
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(i - r0, j) = A.at(i, j);
  return push(std::move(out), rg(a), [a, r0](Tape& t, const Node& self) {
    const Tensor& G = self.grad;
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < G.cols; ++j) t.accumulate_at(a, r0 + i, j, G.at(i, j));
  }, "slice_rows");
}

VarId Tape::masked_softmax(VarId logits, const Tensor& mask) {
  check_id(logits, "masked_softmax");
  const Tensor& L = val(logits);
  if (!L.same_shape(mask))
    throw NumericsError("masked_softmax: mask shape " + mask.shape_str() +
                        " does not match logits " + L.shape_str());
  Tensor out(L.rows, L.cols);
  for (int i = 0; i < L.rows; ++i) {
    std::vector<double> e;
    std::vector<int> idx;
    for (int j = 0; j < L.cols; ++j) {
      if (mask.at(i, j) != 0.0) {
        e.push_back(L.at(i, j));
        idx.push_back(j);
      }
    }
    if (idx.empty())
      throw NumericsError("masked_softmax: row " + std::to_string(i) + " has empty support");
    std::vector<double> p(e.size());
    stable_softmax_row(e, p);
    for (size_t k = 0; k < idx.size(); ++k) out.at(i, idx[k]) = p[k];
  }
  Tensor mask_copy = mask;
  return push(std::move(out), rg(logits),
              [logits, mask_copy](Tape& t, const Node& self) {
    const Tensor& P = self.value;
    const Tensor& G = self.grad;
    Tensor gl(P.rows, P.cols);
    for (int i = 0; i < P.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < P.cols; ++j)
        if (mask_copy.at(i, j) != 0.0) dot += G.at(i, j) * P.at(i, j);
      for (int j = 0; j < P.cols; ++j)
        if (mask_copy.at(i, j) != 0.0) gl.at(i, j) = P.at(i, j) * (G.at(i, j) - dot);
    }
    t.accumulate(logits, gl);
  }, "masked_softmax");
}

VarId Tape::masked_attention(VarId f, VarId g, const SparseMask& mask, double slope) {
  check_id(f, "masked_attention");
  check_id(g, "masked_attention");
  const Tensor& F = val(f);
  const Tensor& G = val(g);
  if (F.rows != mask.rows || F.cols != 1 || G.rows != mask.cols || G.cols != 1)
    throw NumericsError("masked_attention: logit shapes " + F.shape_str() + ", " +
                        G.shape_str() + " do not match mask");
  Tensor out(mask.nnz(), 1);
  for (int i = 0; i < mask.rows; ++i) {
    auto js = mask.row(i);
    if (js.empty())
      throw NumericsError("masked_attention: row " + std::to_string(i) + " has empty support");
    std::vector<double> e(js.size());
    for (size_t k = 0; k < js.size(); ++k) {
      const double x = F.v[i] + G.v[js[k]];
      e[k] = x > 0.0 ? x : slope * x;
    }
    std::span<double> p(out.v.data() + mask.row_ptr[i], js.size());
    stable_softmax_row(e, p);
  }
  const SparseMask* mp = &mask;
  return push(std::move(out), rg(f) || rg(g),
              [f, g, mp, slope](Tape& t, const Node& self) {
    const Tensor& F = t.val(f);
    const Tensor& G = t.val(g);
    Tensor gf(F.rows, 1), gg(G.rows, 1);
    for (int i = 0; i < mp->rows; ++i) {
      auto js = mp->row(i);
      const int base = mp->row_ptr[i];
      double dot = 0.0;
      for (size_t k = 0; k < js.size(); ++k)
        dot += self.grad.v[base + k] * self.value.v[base + k];
      for (size_t k = 0; k < js.size(); ++k) {
        const double de = self.value.v[base + k] * (self.grad.v[base + k] - dot);
        const double x = F.v[i] + G.v[js[k]];
        const double dx = de * (x > 0.0 ? 1.0 : slope);
        gf.v[i] += dx;
        gg.v[js[k]] += dx;
      }
    }
    t.accumulate(f, gf);
    t.accumulate(g, gg);
  }, "masked_attention");
}

VarId Tape::spmm(const SparseMask& mask, VarId vals, VarId dense) {
  check_id(vals, "spmm");
  check_id(dense, "spmm");
  const Tensor& V = val(vals);
  const Tensor& X = val(dense);
  if (V.rows != mask.nnz() || V.cols != 1)
    throw NumericsError("spmm: values shape " + V.shape_str() + " does not match mask nnz");
  if (X.rows != mask.cols)
    throw NumericsError("spmm: dense shape " + X.shape_str() + " does not match mask columns");
  Tensor out(mask.rows, X.cols);
  for (int i = 0; i < mask.rows; ++i) {
    auto js = mask.row(i);
    const int base = mask.row_ptr[i];
    for (size_t k = 0; k < js.size(); ++k) {
      const double a = V.v[base + k];
      for (int c = 0; c < X.cols; ++c) out.at(i, c) += a * X.at(js[k], c);
    }
  }
  const SparseMask* mp = &mask;
  return push(std::move(out), rg(vals) || rg(dense),
              [vals, dense, mp](Tape& t, const Node& self) {
    const Tensor& V = t.val(vals);
    const Tensor& X = t.val(dense);
    const Tensor& G = self.grad;
    if (t.rg(vals)) {
      Tensor gv(V.rows, 1);
      for (int i = 0; i < mp->rows; ++i) {
        auto js = mp->row(i);
        const int base = mp->row_ptr[i];
        for (size_t k = 0; k < js.size(); ++k) {
          double s = 0.0;
          for (int c = 0; c < X.cols; ++c) s += G.at(i, c) * X.at(js[k], c);
          gv.v[base + k] = s;
        }
      }
      t.accumulate(vals, gv);
    }
    if (t.rg(dense)) {
      Tensor gx(X.rows, X.cols);
      for (int i = 0; i < mp->rows; ++i) {
        auto js = mp->row(i);
        const int base = mp->row_ptr[i];
        for (size_t k = 0; k < js.size(); ++k) {
          const double a = V.v[base + k];
          for (int c = 0; c < X.cols; ++c) gx.at(js[k], c) += a * G.at(i, c);
        }
      }
      t.accumulate(dense, gx);
    }
  }, "spmm");
}

VarId Tape::bce_from_probs(VarId pos, VarId neg) {
  check_id(pos, "bce_from_probs");
  check_id(neg, "bce_from_probs");
  const Tensor& P = val(pos);
  const Tensor& Q = val(neg);
  if (P.cols != 1 || Q.cols != 1)
    throw NumericsError("bce_from_probs: probability inputs must be column vectors");
  if (P.rows == 0 || Q.rows == 0)
    throw NumericsError("bce_from_probs: empty positive or negative set");
  const double n = P.rows + Q.rows;
  const double lo = kProbClamp, hi = 1.0 - kProbClamp;
  Tensor out(1, 1);
  double acc = 0.0;
  for (double p : P.v) acc += std::log(std::clamp(p, lo, hi));
  for (double q : Q.v) acc += std::log(std::clamp(1.0 - q, lo, hi));
  out.v[0] = -acc / n;
  return push(std::move(out), rg(pos) || rg(neg),
              [pos, neg, n, lo, hi](Tape& t, const Node& self) {
    const double g0 = self.grad.v[0];
    const Tensor& P = t.val(pos);
    const Tensor& Q = t.val(neg);
    if (t.rg(pos)) {
      Tensor gp(P.rows, 1);
      for (int i = 0; i < P.rows; ++i) {
        if (P.v[i] > lo && P.v[i] < hi) gp.v[i] = -g0 / (n * P.v[i]);
      }
      t.accumulate(pos, gp);
    }
    if (t.rg(neg)) {
      Tensor gq(Q.rows, 1);
      for (int i = 0; i < Q.rows; ++i) {
        const double om = 1.0 - Q.v[i];
        if (om > lo && om < hi) gq.v[i] = g0 / (n * om);
      }
      t.accumulate(neg, gq);
    }
  }, "bce_from_probs");
}

void Tape::backward(VarId loss) {
  if (nodes_.empty()) throw NumericsError("backward: no operations recorded on tape");
  check_id(loss, "backward");
  if (backward_done_) throw NumericsError("backward: tape already swept; use a fresh tape");
  const Tensor& L = val(loss);
  if (L.rows != 1 || L.cols != 1)
    throw NumericsError("backward: loss must be scalar, got " + L.shape_str());
  if (!rg(loss))
    throw NumericsError("backward: loss does not depend on any parameter");
  backward_done_ = true;
  nodes_[loss].grad = Tensor::full(1, 1, 1.0);
  for (VarId id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (!n.grad.all_finite())
      throw NumericsError("backward: non-finite gradient at node " + std::to_string(id));
    if (n.backprop) n.backprop(*this, n);
    if (n.leaf) {
      for (int k = 0; k < n.grad.size(); ++k) n.leaf->grad.v[k] += n.grad.v[k];
    }
  }
}

}  // namespace hgrec
