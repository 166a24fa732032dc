#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hgrec/recommend.hpp"

namespace hgrec {

// Held-out truth: scholar index -> next institution index.
struct GroundTruth {
  std::map<int, int> next_institution;
};

GroundTruth load_truth_tsv(const std::filesystem::path& path, const HeteroGraph& g);

// Rank-based AUC for one scholar: fraction of non-truth institutions scored
// strictly below the truth, ties counted half.
double scholar_auc(const PreferenceList& pre, int truth_institution);

double hit_ratio(int hits, int scholars);

struct EvalConfig {
  std::vector<double> k_grid = {5, 6, 7, 8, 9, 10};  // percent
  bool pooled_auc = false;  // pool truth/negative pairs instead of per-scholar mean
  ProfileScoring scoring = ProfileScoring::kMeanCosine;
};

struct MetricsReport {
  double auc = 0.0;
  std::vector<std::pair<double, double>> hr;  // (K percent, hit ratio)
  int n_scholars = 0;
  int excluded = 0;                         // scholars without truth
  std::map<std::string, int> truth_rank;    // scholar external id -> 1-based rank

  std::string to_json() const;   // deterministic serialization
  std::string to_table() const;  // aligned human-readable table
};

MetricsReport evaluate(const HeteroGraph& g, const Tensor& z, const GroundTruth& truth,
                       const EvalConfig& cfg = {});

}  // namespace hgrec
