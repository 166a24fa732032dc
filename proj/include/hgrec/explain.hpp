#pragma once

#include <string>
#include <vector>

#include "hgrec/infomax.hpp"
#include "hgrec/recommend.hpp"

namespace hgrec {

struct NeighborAttention {
  int neighbor = -1;
  double alpha = 0.0;
};

// Top-n meta-path neighbors of a scholar by attention coefficient (mean over
// heads unless per_head selects one). Includes the scholar itself when its
// self-attention ranks. Ties break by ascending neighbor external id.
std::vector<NeighborAttention> top_attention_neighbors(const AttentionTrace& trace, int path,
                                                       int scholar, int n, const HeteroGraph& g,
                                                       int head = -1);

struct MetaPathImportance {
  std::string name;
  double raw = 0.0;
  double weight = 0.0;
};

std::vector<MetaPathImportance> metapath_importance(const AttentionTrace& trace);

// Member-level view of one recommended institution: each member's embedding
// similarity to the scholar plus, where the member is a meta-path neighbor,
// its attention coefficients.
struct Explanation {
  std::string scholar;
  std::string institution;
  double institution_score = 0.0;
  int institution_rank = 0;
  std::vector<MetaPathImportance> metapaths;
  struct Member {
    std::string id;
    double similarity = 0.0;                            // cosine to the scholar embedding
    std::vector<std::pair<std::string, double>> alpha;  // per path, if a neighbor
  };
  std::vector<Member> members;

  std::string to_json() const;
  std::string to_text() const;
};

Explanation explain_recommendation(int scholar, int institution, const AttentionTrace& trace,
                                   const Tensor& z, const HeteroGraph& g,
                                   const AffiliationIndex& aff);

}  // namespace hgrec
