#include "hgrec/recommend.hpp"

#include <algorithm>
#include <cmath>

#include "hgrec/errors.hpp"

namespace hgrec {

AffiliationIndex AffiliationIndex::build(const HeteroGraph& g) {
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId institution = g.registry().node_type("institution");
  const EdgeTypeId works = g.registry().edge_type("works-with");
  AffiliationIndex idx;
  idx.scholar_institution.assign(g.node_count(author), -1);
  idx.institution_members.resize(g.node_count(institution));
  for (int a = 0; a < g.node_count(author); ++a) {
    const auto& js = g.neighbors(works, author, a);
    if (js.size() != 1)
      throw GraphError("scholar '" + g.external_id(author, a) + "' has " +
                       std::to_string(js.size()) +
                       " works-with edges; recommendation expects exactly one affiliation");
    idx.scholar_institution[a] = js[0];
    idx.institution_members[js[0]].push_back(a);
  }
  return idx;
}

InstitutionProfiles institution_profiles(const Tensor& z, const AffiliationIndex& aff) {
  const int ni = static_cast<int>(aff.institution_members.size());
  InstitutionProfiles out;
  out.profiles = Tensor(ni, z.cols);
  out.has_profile.assign(ni, 0);
  for (int j = 0; j < ni; ++j) {
    const auto& ms = aff.institution_members[j];
    if (ms.empty()) {
      out.warnings.push_back("institution index " + std::to_string(j) +
                             " has no members; excluded from profiles");
      continue;
    }
    out.has_profile[j] = 1;
    for (int m : ms)
      for (int c = 0; c < z.cols; ++c) out.profiles.at(j, c) += z.at(m, c);
    for (int c = 0; c < z.cols; ++c) out.profiles.at(j, c) /= static_cast<double>(ms.size());
  }
  return out;
}

PreferenceList preference_list(int scholar, const Tensor& z, const InstitutionProfiles& profiles,
                               const AffiliationIndex& aff, const HeteroGraph& g,
                               ProfileScoring scoring) {
  const NodeTypeId institution = g.registry().node_type("institution");
  PreferenceList out;
  out.scholar = scholar;
  const double znorm = row_norm(z, scholar);
  out.dot_fallback = znorm == 0.0;

  for (int j = 0; j < profiles.profiles.rows; ++j) {
    if (!profiles.has_profile[j]) continue;
    double score = 0.0;
    if (scoring == ProfileScoring::kMeanCosine) {
      score = out.dot_fallback ? row_dot(z, scholar, profiles.profiles, j)
                               : row_cosine(z, scholar, profiles.profiles, j);
    } else {
      score = -1e300;
      for (int m : aff.institution_members[j]) {
        const double s = out.dot_fallback ? row_dot(z, scholar, z, m)
                                          : row_cosine(z, scholar, z, m);
        score = std::max(score, s);
      }
    }
    out.entries.push_back({j, score});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [&](const ScoredInstitution& a, const ScoredInstitution& b) {
              if (a.score != b.score) return a.score > b.score;
              return g.external_id(institution, a.institution) <
                     g.external_id(institution, b.institution);
            });
  return out;
}

std::vector<int> recommend_topk(const PreferenceList& pre, double k_percent) {
  if (k_percent <= 0.0 || k_percent > 100.0)
    throw DataError("recommend_topk: percentage must lie in (0, 100]");
  const int s = static_cast<int>(pre.entries.size());
  const int k = static_cast<int>(std::ceil(k_percent / 100.0 * s));
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < k && i < s; ++i) out.push_back(pre.entries[i].institution);
  return out;
}

}  // namespace hgrec
