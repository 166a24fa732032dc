#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hgrec/tensor.hpp"

namespace hgrec {

// Trainable tensor with gradient accumulator and Adam state.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;  // first moment
  Tensor s;  // second moment
  long step = 0;

  Parameter(std::string n, Tensor init)
      : name(std::move(n)),
        value(std::move(init)),
        grad(value.rows, value.cols),
        m(value.rows, value.cols),
        s(value.rows, value.cols) {}

  void zero_grad() { std::fill(grad.v.begin(), grad.v.end(), 0.0); }
};

using VarId = int;

// Wengert-list reverse-mode tape. Nodes are recorded in evaluation order,
// which is a topological order, so backward() is a single reverse sweep.
// A tape lives for one forward/backward pass and is confined to one thread.
class Tape {
 public:
  VarId constant(Tensor t);
  VarId param(Parameter& p);

  VarId matmul(VarId a, VarId b);
  VarId transpose(VarId a);
  VarId add(VarId a, VarId b);
  VarId add_rowvec(VarId m, VarId r);  // broadcast a 1xC row over an RxC matrix
  VarId concat_cols(const std::vector<VarId>& xs);
  VarId concat_rows(const std::vector<VarId>& xs);
  VarId leaky_relu(VarId a, double slope);
  VarId tanh_op(VarId a);
  VarId sigmoid_op(VarId a);
  VarId exp_op(VarId a);
  VarId elementwise_mul(VarId a, VarId b);
  VarId scale(VarId a, double c);
  VarId scalar_mul(VarId s, VarId m);  // s is 1x1
  VarId row_mean(VarId a);             // 1xC mean over rows
  VarId sum_all(VarId a);              // 1x1
  VarId element(VarId a, int i, int j);
  VarId slice_rows(VarId a, int r0, int r1);  // rows [r0, r1)

  // Row-wise softmax over the unmasked entries of `logits`; masked positions
  // are exactly zero. mask entries must be 0 or 1; a row with empty support
  // is an error.
  VarId masked_softmax(VarId logits, const Tensor& mask);

  // Attention coefficients over the support of a sparse mask. f and g are
  // Vx1 per-node logit halves; entry (i,j) of the implied score matrix is
  // leaky_relu(f_i + g_j, slope), softmax-normalized within row i over the
  // mask support. Returns the coefficients as an nnz x 1 tensor in CSR
  // order. The mask must outlive the tape.
  VarId masked_attention(VarId f, VarId g, const SparseMask& mask, double slope);

  // Sparse (pattern `mask`, values `vals` in CSR order) times dense.
  VarId spmm(const SparseMask& mask, VarId vals, VarId dense);

  // Negated objective of a noise-contrastive discriminator: mean of
  // -log(p_pos) and -log(1 - p_neg) with probabilities clamped to
  // [1e-12, 1 - 1e-12] before the logs.
  VarId bce_from_probs(VarId pos, VarId neg);

  void backward(VarId loss);

  const Tensor& value(VarId id) const { return nodes_[id].value; }
  const Tensor& grad_of(VarId id) const;
  size_t size() const { return nodes_.size(); }

  static constexpr double kProbClamp = 1e-12;

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated lazily during backward
    bool requires_grad = false;
    Parameter* leaf = nullptr;
    std::function<void(Tape&, const Node&)> backprop;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;

  VarId push(Tensor value, bool requires_grad, std::function<void(Tape&, const Node&)> fn,
             const char* op);
  void accumulate(VarId id, const Tensor& g);
  void accumulate_at(VarId id, int r, int c, double g);
  bool rg(VarId id) const { return nodes_[id].requires_grad; }
  const Tensor& val(VarId id) const { return nodes_[id].value; }
  void check_id(VarId id, const char* op) const;
};

}  // namespace hgrec
