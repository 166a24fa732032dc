#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hgrec/hetgraph.hpp"
#include "hgrec/tensor.hpp"

namespace hgrec {

// Component-wise mean of per-paper document vectors (each 1xD). Throws
// DataError on an empty list or mixed dimensions.
Tensor aggregate_scholar_features(const std::vector<Tensor>& paper_vectors);

// Deterministic bag-of-words embedding: lowercase whitespace tokens, signed
// feature hashing, L2-normalized. Empty text gives the zero vector.
Tensor hash_embed(std::string_view text, int dim, uint64_t seed);

Tensor one_hot_institutions(int count);

// abstracts TSV: paper_external_id <TAB> escaped text
std::vector<std::pair<std::string, std::string>> read_abstracts_tsv(
    const std::filesystem::path& path);

void write_features_tsv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                        const Tensor& features);

// Feature construction for a whole graph: papers from hashed abstracts,
// scholars as the mean of their papers (Eq.-style aggregation over the
// writes adjacency), institutions one-hot. Scholars without papers get the
// zero vector and are reported in `warnings`.
struct BuiltFeatures {
  Tensor scholars;
  Tensor papers;
  Tensor institutions;
  std::vector<std::string> warnings;
};

BuiltFeatures build_features_from_abstracts(
    const HeteroGraph& g, const std::vector<std::pair<std::string, std::string>>& abstracts,
    int dim, uint64_t seed);

}  // namespace hgrec
