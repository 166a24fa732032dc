#include "hgrec/explain.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "hgrec/errors.hpp"

namespace hgrec {

std::vector<NeighborAttention> top_attention_neighbors(const AttentionTrace& trace, int path,
                                                       int scholar, int n, const HeteroGraph& g,
                                                       int head) {
  if (path < 0 || path >= static_cast<int>(trace.masks.size()))
    throw DataError("top_attention_neighbors: bad meta-path index");
  const SparseMask& mask = trace.masks[path];
  if (scholar < 0 || scholar >= mask.rows)
    throw DataError("top_attention_neighbors: scholar index out of range");
  const std::vector<double> alpha =
      head < 0 ? trace.mean_alpha(path) : trace.head_alpha[path][head];

  const NodeTypeId author = g.registry().node_type("author");
  auto js = mask.row(scholar);
  std::vector<NeighborAttention> out;
  for (size_t k = 0; k < js.size(); ++k)
    out.push_back({js[k], alpha[mask.row_ptr[scholar] + k]});
  std::sort(out.begin(), out.end(), [&](const NeighborAttention& a, const NeighborAttention& b) {
    if (a.alpha != b.alpha) return a.alpha > b.alpha;
    return g.external_id(author, a.neighbor) < g.external_id(author, b.neighbor);
  });
  if (static_cast<int>(out.size()) > n) out.resize(n);
  return out;
}

std::vector<MetaPathImportance> metapath_importance(const AttentionTrace& trace) {
  std::vector<MetaPathImportance> out;
  for (size_t p = 0; p < trace.path_names.size(); ++p)
    out.push_back({trace.path_names[p], trace.omega_raw[p], trace.omega[p]});
  return out;
}

Explanation explain_recommendation(int scholar, int institution, const AttentionTrace& trace,
                                   const Tensor& z, const HeteroGraph& g,
                                   const AffiliationIndex& aff) {
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId inst_t = g.registry().node_type("institution");
  if (institution < 0 || institution >= g.node_count(inst_t))
    throw DataError("explain: unknown institution");

  InstitutionProfiles profiles = institution_profiles(z, aff);
  PreferenceList pre = preference_list(scholar, z, profiles, aff, g);

  Explanation ex;
  ex.scholar = g.external_id(author, scholar);
  ex.institution = g.external_id(inst_t, institution);
  ex.metapaths = metapath_importance(trace);
  for (size_t r = 0; r < pre.entries.size(); ++r) {
    if (pre.entries[r].institution == institution) {
      ex.institution_rank = static_cast<int>(r) + 1;
      ex.institution_score = pre.entries[r].score;
    }
  }
  if (ex.institution_rank == 0)
    throw DataError("explain: institution '" + ex.institution + "' absent from preference list");

  for (int m : aff.institution_members[institution]) {
    Explanation::Member mem;
    mem.id = g.external_id(author, m);
    mem.similarity = row_cosine(z, scholar, z, m);
    for (size_t p = 0; p < trace.masks.size(); ++p) {
      const SparseMask& mask = trace.masks[p];
      auto js = mask.row(scholar);
      for (size_t k = 0; k < js.size(); ++k) {
        if (js[k] == m)
          mem.alpha.emplace_back(trace.path_names[p],
                                 trace.mean_alpha(static_cast<int>(p))[mask.row_ptr[scholar] + k]);
      }
    }
    ex.members.push_back(std::move(mem));
  }
  std::sort(ex.members.begin(), ex.members.end(),
            [](const Explanation::Member& a, const Explanation::Member& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.id < b.id;
            });
  return ex;
}

std::string Explanation::to_json() const {
  nlohmann::ordered_json j;
  j["scholar"] = scholar;
  j["institution"] = institution;
  j["institution_rank"] = institution_rank;
  j["institution_score"] = institution_score;
  nlohmann::ordered_json mp;
  for (const auto& m : metapaths) {
    nlohmann::ordered_json e;
    e["name"] = m.name;
    e["raw_score"] = m.raw;
    e["weight"] = m.weight;
    mp.push_back(e);
  }
  j["metapaths"] = mp;
  nlohmann::ordered_json mem;
  for (const auto& m : members) {
    nlohmann::ordered_json e;
    e["scholar"] = m.id;
    e["similarity"] = m.similarity;
    nlohmann::ordered_json al;
    for (const auto& [path, a] : m.alpha) al[path] = a;
    e["attention"] = al;
    mem.push_back(e);
  }
  j["members"] = mem;
  return j.dump(2) + "\n";
}

std::string Explanation::to_text() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "recommendation: " << scholar << " -> " << institution << " (rank "
      << institution_rank << ", score " << institution_score << ")\n";
  out << "meta-path weights:";
  for (const auto& m : metapaths)
    out << "  " << m.name << " " << m.weight << " (raw " << m.raw << ")";
  out << "\nmembers by similarity:\n";
  for (const auto& m : members) {
    out << "  " << m.id << "  cos " << m.similarity;
    for (const auto& [path, a] : m.alpha) out << "  alpha[" << path << "] " << a;
    out << "\n";
  }
  return out.str();
}

}  // namespace hgrec
