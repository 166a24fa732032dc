#pragma once

#include <string>
#include <vector>

#include "hgrec/autograd.hpp"
#include "hgrec/rng.hpp"
#include "hgrec/tensor.hpp"

namespace hgrec {

// One attention head: shared linear map W (head_dim x input_dim) and the
// pair-scoring vector a (2*head_dim x 1).
struct HeadParams {
  Parameter W;
  Parameter a;
};

HeadParams make_head(const std::string& name_prefix, int input_dim, int head_dim, Rng& rng);

// Multi-head masked attention over the neighbors of one meta-path.
// Scores e_ij = leaky_relu(a^T [W h_i || W h_j]) on mask support only, row
// softmax, neighbor aggregation, then per-head concatenation.
class ScholarAttentionLayer {
 public:
  ScholarAttentionLayer(std::string metapath_name, int input_dim, int head_dim, int num_heads,
                        double slope, Rng& rng);

  struct Forward {
    VarId z = -1;                 // V x (num_heads * head_dim)
    std::vector<VarId> alphas;    // per head, nnz x 1 in mask CSR order
    std::vector<VarId> head_out;  // per head, V x head_dim
  };

  // h: V x input_dim variable; mask must have an all-ones diagonal and
  // outlive the tape.
  Forward forward(Tape& tape, VarId h, const SparseMask& mask);

  std::vector<Parameter*> parameters();

  const std::string& name() const { return metapath_name_; }
  int num_heads() const { return static_cast<int>(heads_.size()); }
  int head_dim() const { return head_dim_; }
  double slope() const { return slope_; }
  std::vector<HeadParams>& heads() { return heads_; }

 private:
  std::string metapath_name_;
  int head_dim_;
  double slope_;
  std::vector<HeadParams> heads_;
};

// Learned fusion across meta-paths: raw importance of each path is the mean
// over scholars of q^T tanh(W z + b); fusion weights are the softmax of the
// raw importances across paths. Raw scores are kept for explanation output.
class SemanticAttention {
 public:
  SemanticAttention(int embed_dim, int hidden_dim, Rng& rng);

  struct Forward {
    VarId omega = -1;  // 1 x P, softmax-normalized
    VarId raw = -1;    // 1 x P
  };

  Forward forward(Tape& tape, const std::vector<VarId>& per_path_z);

  std::vector<Parameter*> parameters();

  Parameter& W() { return w_; }
  Parameter& b() { return b_; }
  Parameter& q() { return q_; }

 private:
  Parameter w_;  // hidden x embed
  Parameter b_;  // 1 x hidden
  Parameter q_;  // hidden x 1
};

// Weighted sum of per-path embeddings with weights omega (1 x P).
VarId fuse_metapaths(Tape& tape, VarId omega, const std::vector<VarId>& per_path_z);

// Dense attention-coefficient matrix of one head, for tests and explanation
// output; rows are restricted to the mask support and sum to one.
Tensor attention_matrix(HeadParams& head, const Tensor& h, const SparseMask& mask, double slope);

Tensor glorot_uniform(int rows, int cols, Rng& rng);

}  // namespace hgrec
