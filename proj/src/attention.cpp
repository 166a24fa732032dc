#include "hgrec/attention.hpp"

#include <cmath>

#include "hgrec/errors.hpp"

namespace hgrec {

Tensor glorot_uniform(int rows, int cols, Rng& rng) {
  const double lim = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (double& x : t.v) x = rng.uniform(-lim, lim);
  return t;
}

HeadParams make_head(const std::string& name_prefix, int input_dim, int head_dim, Rng& rng) {
  return HeadParams{
      Parameter(name_prefix + ".W", glorot_uniform(head_dim, input_dim, rng)),
      Parameter(name_prefix + ".a", glorot_uniform(2 * head_dim, 1, rng)),
  };
}

ScholarAttentionLayer::ScholarAttentionLayer(std::string metapath_name, int input_dim,
                                             int head_dim, int num_heads, double slope, Rng& rng)
    : metapath_name_(std::move(metapath_name)), head_dim_(head_dim), slope_(slope) {
  if (num_heads < 1) throw NumericsError("attention layer needs at least one head");
  heads_.reserve(num_heads);
  for (int k = 0; k < num_heads; ++k)
    heads_.push_back(make_head(metapath_name_ + ".head" + std::to_string(k), input_dim, head_dim, rng));
}

ScholarAttentionLayer::Forward ScholarAttentionLayer::forward(Tape& tape, VarId h,
                                                              const SparseMask& mask) {
  if (!mask.diagonal_all_ones())
    throw NumericsError("attention mask for '" + metapath_name_ +
                        "' must include every node itself (diagonal of ones)");
  if (tape.value(h).rows != mask.rows)
    throw NumericsError("attention input rows do not match mask for '" + metapath_name_ + "'");
  Forward out;
  std::vector<VarId> parts;
  for (HeadParams& head : heads_) {
    VarId hw = tape.matmul(h, tape.transpose(tape.param(head.W)));  // V x head_dim
    VarId av = tape.param(head.a);
    VarId f = tape.matmul(hw, tape.slice_rows(av, 0, head_dim_));
    VarId g = tape.matmul(hw, tape.slice_rows(av, head_dim_, 2 * head_dim_));
    VarId alpha = tape.masked_attention(f, g, mask, slope_);
    VarId z = tape.leaky_relu(tape.spmm(mask, alpha, hw), slope_);
    out.alphas.push_back(alpha);
    out.head_out.push_back(z);
    parts.push_back(z);
  }
  out.z = parts.size() == 1 ? parts[0] : tape.concat_cols(parts);
  return out;
}

std::vector<Parameter*> ScholarAttentionLayer::parameters() {
  std::vector<Parameter*> ps;
  for (HeadParams& h : heads_) {
    ps.push_back(&h.W);
    ps.push_back(&h.a);
  }
  return ps;
}

SemanticAttention::SemanticAttention(int embed_dim, int hidden_dim, Rng& rng)
    : w_("semantic.W", glorot_uniform(hidden_dim, embed_dim, rng)),
      b_("semantic.b", Tensor(1, hidden_dim)),
      q_("semantic.q", glorot_uniform(hidden_dim, 1, rng)) {}

SemanticAttention::Forward SemanticAttention::forward(Tape& tape,
                                                      const std::vector<VarId>& per_path_z) {
  if (per_path_z.empty()) throw NumericsError("semantic attention needs at least one meta-path");
  VarId wv = tape.param(w_);
  VarId bv = tape.param(b_);
  VarId qv = tape.param(q_);
  std::vector<VarId> raw_scores;
  for (VarId z : per_path_z) {
    VarId proj = tape.tanh_op(tape.add_rowvec(tape.matmul(z, tape.transpose(wv)), bv));
    raw_scores.push_back(tape.row_mean(tape.matmul(proj, qv)));  // 1x1 mean over scholars
  }
  Forward out;
  out.raw = raw_scores.size() == 1 ? raw_scores[0] : tape.concat_cols(raw_scores);
  out.omega = tape.masked_softmax(out.raw, Tensor::full(1, static_cast<int>(per_path_z.size()), 1.0));
  return out;
}

std::vector<Parameter*> SemanticAttention::parameters() { return {&w_, &b_, &q_}; }

VarId fuse_metapaths(Tape& tape, VarId omega, const std::vector<VarId>& per_path_z) {
  if (per_path_z.empty()) throw NumericsError("fuse: empty meta-path list");
  if (tape.value(omega).cols != static_cast<int>(per_path_z.size()))
    throw NumericsError("fuse: weight count does not match meta-path count");
  VarId acc = -1;
  for (size_t i = 0; i < per_path_z.size(); ++i) {
    VarId term = tape.scalar_mul(tape.element(omega, 0, static_cast<int>(i)), per_path_z[i]);
    acc = i == 0 ? term : tape.add(acc, term);
  }
  return acc;
}

Tensor attention_matrix(HeadParams& head, const Tensor& h, const SparseMask& mask, double slope) {
  Tape tape;
  VarId hv = tape.constant(h);
  VarId hw = tape.matmul(hv, tape.transpose(tape.param(head.W)));
  VarId av = tape.param(head.a);
  const int dp = head.W.value.rows;
  VarId f = tape.matmul(hw, tape.slice_rows(av, 0, dp));
  VarId g = tape.matmul(hw, tape.slice_rows(av, dp, 2 * dp));
  VarId alpha = tape.masked_attention(f, g, mask, slope);
  Tensor dense(mask.rows, mask.cols);
  const Tensor& vals = tape.value(alpha);
  for (int i = 0; i < mask.rows; ++i) {
    auto js = mask.row(i);
    for (size_t k = 0; k < js.size(); ++k) dense.at(i, js[k]) = vals.v[mask.row_ptr[i] + k];
  }
  return dense;
}

}  // namespace hgrec
