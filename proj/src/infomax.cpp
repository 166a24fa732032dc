#include "hgrec/infomax.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hgrec/errors.hpp"
#include "hgrec/rng.hpp"

namespace hgrec {

VarId readout(Tape& tape, VarId z) {
  if (tape.value(z).rows == 0) throw NumericsError("readout: empty embedding matrix");
  return tape.row_mean(z);
}

CorruptedGraph corrupt(const HeteroGraph& g, uint64_t seed) {
  CorruptedGraph out;
  out.base = &g;
  const int nt = g.registry().num_node_types();
  out.permutations.resize(nt);
  out.features.resize(nt);
  for (NodeTypeId t = 0; t < nt; ++t) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(t)));
    const int n = g.node_count(t);
    out.permutations[t] = rng.permutation(n);
    if (!g.has_features(t)) continue;
    const Tensor& src = g.features(t);
    Tensor dst(src.rows, src.cols);
    for (int i = 0; i < n; ++i) {
      auto from = src.row(out.permutations[t][i]);
      std::copy(from.begin(), from.end(), dst.row(i).begin());
    }
    out.features[t] = std::move(dst);
  }
  return out;
}

double discriminate(std::span<const double> z, std::span<const double> s, const Tensor& w) {
  if (static_cast<int>(z.size()) != w.rows || static_cast<int>(s.size()) != w.cols)
    throw NumericsError("discriminate: dimension mismatch");
  double logit = 0.0;
  for (int i = 0; i < w.rows; ++i) {
    double ws = 0.0;
    for (int j = 0; j < w.cols; ++j) ws += w.at(i, j) * s[j];
    logit += z[i] * ws;
  }
  return 1.0 / (1.0 + std::exp(-logit));
}

VarId discriminate_all(Tape& tape, VarId z, VarId s, VarId w) {
  VarId ws = tape.matmul(w, tape.transpose(s));  // embed x 1
  return tape.sigmoid_op(tape.matmul(z, ws));    // V x 1
}

double bce_objective(std::span<const double> pos_probs, std::span<const double> neg_probs) {
  if (pos_probs.empty() || neg_probs.empty())
    throw NumericsError("bce_objective: empty positive or negative set");
  const double lo = Tape::kProbClamp, hi = 1.0 - Tape::kProbClamp;
  double acc = 0.0;
  for (double p : pos_probs) acc += std::log(std::clamp(p, lo, hi));
  for (double q : neg_probs) acc += std::log(std::clamp(1.0 - q, lo, hi));
  return -acc / static_cast<double>(pos_probs.size() + neg_probs.size());
}

std::vector<double> AttentionTrace::mean_alpha(int path) const {
  const auto& heads = head_alpha[path];
  std::vector<double> mean(heads.front().size(), 0.0);
  for (const auto& h : heads)
    for (size_t k = 0; k < h.size(); ++k) mean[k] += h[k];
  for (double& x : mean) x /= static_cast<double>(heads.size());
  return mean;
}

std::vector<MetaPath> standard_metapaths(const HeteroGraph& g,
                                         const std::vector<std::string>& names) {
  std::vector<MetaPath> out;
  for (const std::string& n : names) {
    if (n == "APA")
      out.push_back(make_metapath(g.registry(), "APA", {"author", "paper", "author"},
                                  {"writes", "writes"}));
    else if (n == "AIA")
      out.push_back(make_metapath(g.registry(), "AIA", {"author", "institution", "author"},
                                  {"works-with", "works-with"}));
    else
      throw ConfigError("unknown meta-path name '" + n + "' (expected APA or AIA)");
  }
  return out;
}

namespace {

struct ForwardBundle {
  ScholarEmbeddingModel::Forward fwd;
  VarId probs = -1;
};

ForwardBundle run_side(Tape& tape, ScholarEmbeddingModel& model, const Tensor& features,
                       const std::vector<const SparseMask*>& masks, VarId disc_w) {
  ForwardBundle b;
  b.fwd = model.forward(tape, tape.constant(features), masks);
  VarId s = readout(tape, b.fwd.fused);
  b.probs = discriminate_all(tape, b.fwd.fused, s, disc_w);
  return b;
}

AttentionTrace make_trace(Tape& tape, const ScholarEmbeddingModel::Forward& fwd,
                          const std::vector<std::string>& names,
                          const std::vector<SparseMask>& masks) {
  AttentionTrace trace;
  trace.path_names = names;
  trace.masks = masks;
  for (const auto& path_alphas : fwd.alphas) {
    std::vector<std::vector<double>> heads;
    for (VarId a : path_alphas) heads.push_back(tape.value(a).v);
    trace.head_alpha.push_back(std::move(heads));
  }
  trace.omega = tape.value(fwd.omega).v;
  trace.omega_raw = tape.value(fwd.raw_scores).v;
  return trace;
}

}  // namespace

TrainResult train(const HeteroGraph& g, const TrainConfig& cfg,
                  const Tensor* scholar_features_override) {
  const NodeTypeId author = g.registry().node_type("author");
  if (!g.has_features(author) && scholar_features_override == nullptr)
    throw GraphError("training requires scholar features");
  const Tensor& H = scholar_features_override ? *scholar_features_override : g.features(author);
  if (H.rows != g.node_count(author))
    throw GraphError("scholar feature rows do not match scholar count");

  ModelConfig mc = cfg.model;
  mc.input_dim = H.cols;

  std::vector<MetaPath> paths = standard_metapaths(g, cfg.metapaths);
  std::vector<SparseMask> masks;
  masks.reserve(paths.size());
  for (const MetaPath& p : paths) masks.push_back(metapath_adjacency(g, p));
  std::vector<const SparseMask*> mask_ptrs;
  for (const SparseMask& m : masks) mask_ptrs.push_back(&m);

  TrainResult result{ScholarEmbeddingModel(mc, cfg.metapaths, cfg.seed), Tensor{}, {}, {}, {}};
  ScholarEmbeddingModel& model = result.model;
  std::vector<Parameter*> params = model.parameters();

  if (cfg.epochs == 0)
    result.warnings.push_back("epochs = 0: checkpoint holds initialized, untrained parameters");

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const uint64_t corrupt_salt = cfg.fresh_corruption ? 1000 + epoch : 1000;
    CorruptedGraph neg = corrupt(g, mix_seed(cfg.seed, corrupt_salt));
    Tensor h_neg;
    if (scholar_features_override) {
      // apply the recorded scholar permutation to the override matrix
      const auto& perm = neg.permutations[author];
      h_neg = Tensor(H.rows, H.cols);
      for (int i = 0; i < H.rows; ++i) {
        auto from = H.row(perm[i]);
        std::copy(from.begin(), from.end(), h_neg.row(i).begin());
      }
    } else {
      h_neg = neg.features[author];
    }

    try {
      Tape tape;
      VarId disc_w = tape.param(model.discriminator());
      ForwardBundle pos = run_side(tape, model, H, mask_ptrs, disc_w);
      ForwardBundle negb = run_side(tape, model, h_neg, mask_ptrs, disc_w);
      VarId loss = tape.bce_from_probs(pos.probs, negb.probs);

      EpochLog log;
      log.epoch = epoch;
      log.loss = tape.value(loss).v[0];
      log.omega = tape.value(pos.fwd.omega).v;
      log.omega_raw = tape.value(pos.fwd.raw_scores).v;

      tape.backward(loss);
      adam_step(params, cfg.adam);

      log.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
      result.log.push_back(std::move(log));
    } catch (const NumericsError& e) {
      throw NumericsError("training aborted at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }

  // final pass on the uncorrupted graph
  Tape tape;
  auto fwd = model.forward(tape, tape.constant(H), mask_ptrs);
  result.embeddings = tape.value(fwd.fused);
  result.trace = make_trace(tape, fwd, cfg.metapaths, masks);
  return result;
}

std::pair<Tensor, AttentionTrace> embed_with_trace(ScholarEmbeddingModel& model,
                                                   const HeteroGraph& g,
                                                   const std::vector<std::string>& metapaths) {
  const NodeTypeId author = g.registry().node_type("author");
  if (!g.has_features(author)) throw GraphError("graph has no scholar features");
  const Tensor& H = g.features(author);
  if (H.cols != model.config().input_dim)
    throw GraphError("scholar feature dimension " + std::to_string(H.cols) +
                     " does not match checkpoint input dimension " +
                     std::to_string(model.config().input_dim));

  std::vector<MetaPath> paths = standard_metapaths(g, metapaths);
  std::vector<SparseMask> masks;
  for (const MetaPath& p : paths) masks.push_back(metapath_adjacency(g, p));
  std::vector<const SparseMask*> mask_ptrs;
  for (const SparseMask& m : masks) mask_ptrs.push_back(&m);

  Tape tape;
  auto fwd = model.forward(tape, tape.constant(H), mask_ptrs);
  return {tape.value(fwd.fused), make_trace(tape, fwd, metapaths, masks)};
}

}  // namespace hgrec
