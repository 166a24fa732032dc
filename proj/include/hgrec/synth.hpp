#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "hgrec/hetgraph.hpp"

namespace hgrec {

// Planted-structure generator: scholars carry hidden research topics,
// institutions are topic-aligned, co-authorship is mostly intra-topic, and
// the held-out "next institution" is a collaborator's with probability
// p_move, otherwise uniform.
struct SynthConfig {
  int scholars = 200;
  int papers = 300;
  int institutions = 10;
  int topics = 5;
  double p_move = 0.74;          // held-out truth follows a collaborator
  double co_location = 0.5;      // extra coauthor drawn from own institution
  double intra_topic = 0.45;     // else from own topic; remainder uniform
  double institution_purity = 1.0;  // scholar placed at an own-topic institution
  double noise_sigma = 0.3;      // feature noise around topic centroids
  double three_author_prob = 0.3;
  int feature_dim = 64;
  uint64_t seed = 0;
};

struct SynthResult {
  HeteroGraph graph;
  std::map<int, int> truth;   // scholar index -> institution index
  std::vector<int> topic;     // hidden topic label per scholar index
};

SynthResult generate(const SynthConfig& cfg);

// Writes nodes.tsv, edges.tsv, per-type feature TSVs, truth.tsv and
// topics.tsv into dir.
SynthResult write_synth_dataset(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace hgrec
