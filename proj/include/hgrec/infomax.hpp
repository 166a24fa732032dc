#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hgrec/adam.hpp"
#include "hgrec/hetgraph.hpp"
#include "hgrec/model.hpp"

namespace hgrec {

// Global summary: component-wise mean of embedding rows.
VarId readout(Tape& tape, VarId z);

// Type-wise feature-row shuffle. Topology is shared with the source graph;
// only feature rows move, and the permutations are recorded.
struct CorruptedGraph {
  const HeteroGraph* base = nullptr;
  std::vector<std::vector<int>> permutations;  // per node type; new row i = old row perm[i]
  std::vector<Tensor> features;                // per node type, permuted copies
};

CorruptedGraph corrupt(const HeteroGraph& g, uint64_t seed);

// sigma(z W s^T) for one embedding row against a summary row.
double discriminate(std::span<const double> z, std::span<const double> s, const Tensor& w);

// Batched discriminator probabilities for every row of z: sigma(Z W s^T).
VarId discriminate_all(Tape& tape, VarId z, VarId s, VarId w);

// Objective value on plain probability lists (clamped away from 0/1);
// the tape op Tape::bce_from_probs computes the same quantity.
double bce_objective(std::span<const double> pos_probs, std::span<const double> neg_probs);

struct TrainConfig {
  int epochs = 10;
  AdamConfig adam;  // lr 1e-3, betas 0.9/0.999, eps 1e-8
  uint64_t seed = 0;
  bool deterministic = true;        // single-threaded fixed-order execution
  bool fresh_corruption = true;     // new corruption seed each epoch
  ModelConfig model;
  std::vector<std::string> metapaths = {"APA", "AIA"};
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  std::vector<double> omega;      // fusion weights per meta-path
  std::vector<double> omega_raw;  // unnormalized importances
  double wall_ms = 0.0;
};

// Attention internals of a forward pass, kept for explanation output.
struct AttentionTrace {
  std::vector<std::string> path_names;
  std::vector<SparseMask> masks;                            // per path
  std::vector<std::vector<std::vector<double>>> head_alpha; // [path][head][nnz]
  std::vector<double> omega;
  std::vector<double> omega_raw;

  // mean over heads, aligned with masks[path]
  std::vector<double> mean_alpha(int path) const;
};

struct TrainResult {
  ScholarEmbeddingModel model;
  Tensor embeddings;  // fused Z from the uncorrupted graph after training
  std::vector<EpochLog> log;
  AttentionTrace trace;
  std::vector<std::string> warnings;
};

// Standard meta-paths over the scholar/paper/institution schema.
std::vector<MetaPath> standard_metapaths(const HeteroGraph& g,
                                         const std::vector<std::string>& names);

// Unsupervised training: per epoch, forward on the real graph (positives)
// and on a freshly corrupted one (negatives, tied parameters), noise-
// contrastive objective, Adam step. scholar_features_override substitutes
// the scholar feature matrix (used by the feature-shuffle ablation).
TrainResult train(const HeteroGraph& g, const TrainConfig& cfg,
                  const Tensor* scholar_features_override = nullptr);

// Forward pass of an already-trained model over a graph, with the attention
// internals captured (checkpoint-driven path of recommend/evaluate/explain).
std::pair<Tensor, AttentionTrace> embed_with_trace(ScholarEmbeddingModel& model,
                                                   const HeteroGraph& g,
                                                   const std::vector<std::string>& metapaths);

}  // namespace hgrec
