#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hgrec/infomax.hpp"
#include "hgrec/metrics.hpp"

namespace hgrec {

// Run configuration shared by the CLI subcommands. Values come from a
// key = value config file (dotted keys, # comments) overridden by flags.
struct RunConfig {
  // paths
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path features_author;
  std::filesystem::path features_paper;
  std::filesystem::path features_institution;
  std::filesystem::path truth;
  std::filesystem::path checkpoint;
  std::filesystem::path out_dir = ".";

  // model
  int embed_dim = 128;  // num_heads * head_dim
  int num_heads = 2;
  int sem_hidden = 128;
  double slope = 0.2;

  // training
  int epochs = 10;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  bool deterministic = true;

  // evaluation
  std::vector<double> k_grid = {5, 6, 7, 8, 9, 10};
  bool pooled_auc = false;
  bool max_member_scoring = false;

  std::vector<std::string> metapaths = {"APA", "AIA"};

  ModelConfig model_config() const;   // validates divisibility and positivity
  TrainConfig train_config() const;
  EvalConfig eval_config() const;
  GraphSources graph_sources() const;
};

// Parses `key = value` lines; unknown keys are errors.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

std::vector<double> parse_k_grid(const std::string& csv);

}  // namespace hgrec
