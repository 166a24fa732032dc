#include "hgrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "hgrec/errors.hpp"
#include "hgrec/tsv.hpp"

namespace hgrec {

GroundTruth load_truth_tsv(const std::filesystem::path& path, const HeteroGraph& g) {
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId institution = g.registry().node_type("institution");
  GroundTruth t;
  for (const auto& rec : read_tsv(path, 2)) {
    auto a = g.find_node(rec.fields[0]);
    if (!a || a->type != author)
      throw DataError(path.string() + ":" + std::to_string(rec.line) +
                      ": unknown scholar id '" + rec.fields[0] + "'");
    auto i = g.find_node(rec.fields[1]);
    if (!i || i->type != institution)
      throw DataError(path.string() + ":" + std::to_string(rec.line) +
                      ": unknown institution id '" + rec.fields[1] + "'");
    t.next_institution[a->index] = i->index;
  }
  return t;
}

double scholar_auc(const PreferenceList& pre, int truth_institution) {
  double truth_score = 0.0;
  bool found = false;
  for (const auto& e : pre.entries)
    if (e.institution == truth_institution) {
      truth_score = e.score;
      found = true;
      break;
    }
  if (!found) throw DataError("scholar_auc: truth institution missing from preference list");
  const int s = static_cast<int>(pre.entries.size());
  if (s <= 1) return 1.0;  // no negatives to rank against
  double below = 0.0, tied = 0.0;
  for (const auto& e : pre.entries) {
    if (e.institution == truth_institution) continue;
    if (e.score < truth_score) below += 1.0;
    else if (e.score == truth_score) tied += 1.0;
  }
  return (below + 0.5 * tied) / static_cast<double>(s - 1);
}

double hit_ratio(int hits, int scholars) {
  if (scholars <= 0) throw DataError("hit_ratio: empty evaluation set");
  return static_cast<double>(hits) / static_cast<double>(scholars);
}

MetricsReport evaluate(const HeteroGraph& g, const Tensor& z, const GroundTruth& truth,
                       const EvalConfig& cfg) {
  const NodeTypeId author = g.registry().node_type("author");
  if (truth.next_institution.empty()) throw DataError("evaluate: no ground truth provided");

  AffiliationIndex aff = AffiliationIndex::build(g);
  InstitutionProfiles profiles = institution_profiles(z, aff);

  MetricsReport rep;
  rep.excluded = g.node_count(author) - static_cast<int>(truth.next_institution.size());

  std::vector<double> k_sorted = cfg.k_grid;
  std::sort(k_sorted.begin(), k_sorted.end());
  std::vector<int> hits(k_sorted.size(), 0);

  double auc_sum = 0.0;
  double pooled_below = 0.0, pooled_pairs = 0.0;
  int n = 0;
  for (const auto& [a, ti] : truth.next_institution) {
    PreferenceList pre = preference_list(a, z, profiles, aff, g, cfg.scoring);
    const double auc = scholar_auc(pre, ti);
    auc_sum += auc;
    pooled_below += auc * static_cast<double>(pre.entries.size() - 1);
    pooled_pairs += static_cast<double>(pre.entries.size() - 1);
    ++n;

    int rank = 0;
    for (size_t r = 0; r < pre.entries.size(); ++r)
      if (pre.entries[r].institution == ti) rank = static_cast<int>(r) + 1;
    rep.truth_rank[g.external_id(author, a)] = rank;

    for (size_t ki = 0; ki < k_sorted.size(); ++ki) {
      const int k = static_cast<int>(std::ceil(k_sorted[ki] / 100.0 *
                                               static_cast<double>(pre.entries.size())));
      if (rank <= k) ++hits[ki];
    }
  }
  rep.n_scholars = n;
  rep.auc = cfg.pooled_auc ? (pooled_pairs > 0 ? pooled_below / pooled_pairs : 0.0)
                           : auc_sum / static_cast<double>(n);
  for (size_t ki = 0; ki < k_sorted.size(); ++ki)
    rep.hr.emplace_back(k_sorted[ki], hit_ratio(hits[ki], n));
  return rep;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["auc"] = auc;
  nlohmann::ordered_json hrj;
  for (const auto& [k, v] : hr) {
    std::ostringstream key;
    key << k << '%';
    hrj[key.str()] = v;
  }
  j["hr"] = hrj;
  j["n_scholars"] = n_scholars;
  j["excluded"] = excluded;
  nlohmann::ordered_json ranks;
  for (const auto& [id, r] : truth_rank) ranks[id] = r;
  j["truth_rank"] = ranks;
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  out << "scholars evaluated: " << n_scholars << "  (excluded without truth: " << excluded
      << ")\n";
  out << "metric ";
  for (const auto& [k, v] : hr) {
    (void)v;
    out << "    HR@" << k << '%';
  }
  out << "       AUC\n";
  out << "value  ";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& [k, v] : hr) {
    (void)k;
    out << "    " << v << " ";
  }
  out << "    " << auc << "\n";
  return out.str();
}

}  // namespace hgrec
