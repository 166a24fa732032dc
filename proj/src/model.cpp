#include "hgrec/model.hpp"

#include "hgrec/errors.hpp"

namespace hgrec {

namespace {

std::vector<ScholarAttentionLayer> build_layers(const ModelConfig& cfg,
                                                const std::vector<std::string>& names, Rng& rng) {
  std::vector<ScholarAttentionLayer> layers;
  layers.reserve(names.size());
  for (const std::string& n : names)
    layers.emplace_back(n, cfg.input_dim, cfg.head_dim, cfg.num_heads, cfg.slope, rng);
  return layers;
}

}  // namespace

ScholarEmbeddingModel::ScholarEmbeddingModel(const ModelConfig& cfg,
                                             std::vector<std::string> metapath_names,
                                             uint64_t seed)
    : cfg_(cfg),
      names_(std::move(metapath_names)),
      layers_([&] {
        if (names_.empty()) throw NumericsError("model needs at least one meta-path");
        Rng rng(mix_seed(seed, 0xa77e));
        return build_layers(cfg_, names_, rng);
      }()),
      semantic_([&] {
        Rng rng(mix_seed(seed, 0x5e3a));
        return SemanticAttention(cfg_.head_dim * cfg_.num_heads, cfg_.sem_hidden, rng);
      }()),
      discriminator_w_("discriminator.W", [&] {
        Rng rng(mix_seed(seed, 0xd15c));
        const int e = cfg_.head_dim * cfg_.num_heads;
        return glorot_uniform(e, e, rng);
      }()) {}

ScholarEmbeddingModel::Forward ScholarEmbeddingModel::forward(
    Tape& tape, VarId h, const std::vector<const SparseMask*>& masks) {
  if (masks.size() != layers_.size())
    throw NumericsError("model forward: expected " + std::to_string(layers_.size()) +
                        " masks, got " + std::to_string(masks.size()));
  Forward out;
  for (size_t p = 0; p < layers_.size(); ++p) {
    auto lf = layers_[p].forward(tape, h, *masks[p]);
    out.per_path.push_back(lf.z);
    out.alphas.push_back(std::move(lf.alphas));
  }
  auto sem = semantic_.forward(tape, out.per_path);
  out.omega = sem.omega;
  out.raw_scores = sem.raw;
  out.fused = fuse_metapaths(tape, sem.omega, out.per_path);
  return out;
}

Tensor ScholarEmbeddingModel::embed(const Tensor& h,
                                    const std::vector<const SparseMask*>& masks) {
  Tape tape;
  auto fwd = forward(tape, tape.constant(h), masks);
  return tape.value(fwd.fused);
}

std::vector<Parameter*> ScholarEmbeddingModel::parameters() {
  std::vector<Parameter*> ps;
  for (ScholarAttentionLayer& l : layers_)
    for (Parameter* p : l.parameters()) ps.push_back(p);
  for (Parameter* p : semantic_.parameters()) ps.push_back(p);
  ps.push_back(&discriminator_w_);
  return ps;
}

}  // namespace hgrec
