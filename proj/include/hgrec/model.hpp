#pragma once

#include <string>
#include <vector>

#include "hgrec/attention.hpp"
#include "hgrec/hetgraph.hpp"

namespace hgrec {

struct ModelConfig {
  int input_dim = 64;   // scholar feature dimension
  int head_dim = 64;    // per-head output dimension
  int num_heads = 2;    // embedding dimension is num_heads * head_dim
  int sem_hidden = 128; // semantic attention hidden dimension
  double slope = 0.2;   // LeakyReLU slope, shared by scores and aggregation
};

// Per-meta-path attention towers, semantic fusion, and the bilinear
// discriminator, owned together so checkpoints capture the whole model.
class ScholarEmbeddingModel {
 public:
  ScholarEmbeddingModel(const ModelConfig& cfg, std::vector<std::string> metapath_names,
                        uint64_t seed);

  struct Forward {
    VarId fused = -1;                       // V x embed_dim
    std::vector<VarId> per_path;            // each V x embed_dim
    VarId omega = -1;                       // 1 x P
    VarId raw_scores = -1;                  // 1 x P
    std::vector<std::vector<VarId>> alphas; // [path][head], nnz x 1
  };

  Forward forward(Tape& tape, VarId h, const std::vector<const SparseMask*>& masks);

  // Convenience non-training pass: runs a local tape and returns values.
  Tensor embed(const Tensor& h, const std::vector<const SparseMask*>& masks);

  std::vector<Parameter*> parameters();
  const ModelConfig& config() const { return cfg_; }
  int embed_dim() const { return cfg_.head_dim * cfg_.num_heads; }
  const std::vector<std::string>& metapath_names() const { return names_; }
  std::vector<ScholarAttentionLayer>& layers() { return layers_; }
  SemanticAttention& semantic() { return semantic_; }
  Parameter& discriminator() { return discriminator_w_; }

 private:
  ModelConfig cfg_;
  std::vector<std::string> names_;
  std::vector<ScholarAttentionLayer> layers_;
  SemanticAttention semantic_;
  Parameter discriminator_w_;
};

}  // namespace hgrec
