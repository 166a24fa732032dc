#pragma once

#include <string>
#include <vector>

#include "hgrec/hetgraph.hpp"
#include "hgrec/tensor.hpp"

namespace hgrec {

// Scholar/institution membership derived from works-with edges. Every
// scholar must have exactly one current institution.
struct AffiliationIndex {
  std::vector<int> scholar_institution;               // scholar index -> institution index
  std::vector<std::vector<int>> institution_members;  // institution index -> scholar indices

  static AffiliationIndex build(const HeteroGraph& g);
};

enum class ProfileScoring {
  kMeanCosine,       // cosine against the member-mean profile (default)
  kMaxMemberCosine,  // best cosine against any member embedding
};

struct InstitutionProfiles {
  Tensor profiles;                  // one row per institution; zero rows for excluded
  std::vector<char> has_profile;    // institutions with at least one member
  std::vector<std::string> warnings;
};

InstitutionProfiles institution_profiles(const Tensor& z, const AffiliationIndex& aff);

struct ScoredInstitution {
  int institution = -1;
  double score = 0.0;
};

// Total order over institutions for one scholar: descending score, ties
// broken by ascending institution external id.
struct PreferenceList {
  int scholar = -1;
  std::vector<ScoredInstitution> entries;
  bool dot_fallback = false;  // zero-norm embedding: ranked by dot product
};

PreferenceList preference_list(int scholar, const Tensor& z, const InstitutionProfiles& profiles,
                               const AffiliationIndex& aff, const HeteroGraph& g,
                               ProfileScoring scoring = ProfileScoring::kMeanCosine);

// First ceil(k_percent/100 * list size) institutions of the preference list.
std::vector<int> recommend_topk(const PreferenceList& pre, double k_percent);

}  // namespace hgrec
