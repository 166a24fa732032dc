#include "hgrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "hgrec/errors.hpp"
#include "hgrec/features.hpp"
#include "hgrec/rng.hpp"
#include "hgrec/tsv.hpp"

namespace hgrec {

namespace {

std::string padded_id(char prefix, int index, int count) {
  const size_t width = std::to_string(count - 1).size();
  std::string num = std::to_string(index);
  return prefix + std::string(width - num.size(), '0') + num;
}

void check_config(const SynthConfig& c) {
  if (c.scholars < 1 || c.papers < 1 || c.institutions < 1 || c.topics < 1)
    throw ConfigError("synth: all counts must be at least 1");
  if (c.institutions > c.scholars)
    throw ConfigError("synth: more institutions than scholars is infeasible");
  if (c.feature_dim < c.topics)
    throw ConfigError("synth: feature_dim must be at least the topic count");
  for (double p : {c.p_move, c.co_location, c.intra_topic, c.institution_purity,
                   c.three_author_prob})
    if (p < 0.0 || p > 1.0) throw ConfigError("synth: probabilities must lie in [0, 1]");
  if (c.co_location + c.intra_topic > 1.0)
    throw ConfigError("synth: co_location + intra_topic must not exceed 1");
}

int pick_from(Rng& rng, const std::vector<int>& pool) { return pool[rng.below(static_cast<int>(pool.size()))]; }

}  // namespace

SynthResult generate(const SynthConfig& cfg) {
  check_config(cfg);
  Rng rng(cfg.seed);

  const int S = cfg.scholars, P = cfg.papers, I = cfg.institutions, T = cfg.topics;

  std::vector<int> topic(S);
  for (int a = 0; a < S; ++a) topic[a] = a % T;
  rng.shuffle(topic);

  // institutions are topic-aligned round-robin; scholars join an own-topic
  // institution with probability institution_purity
  std::vector<int> inst_topic(I);
  for (int j = 0; j < I; ++j) inst_topic[j] = j % T;
  std::vector<std::vector<int>> insts_of_topic(T);
  for (int j = 0; j < I; ++j) insts_of_topic[inst_topic[j]].push_back(j);

  std::vector<int> inst(S);
  for (int a = 0; a < S; ++a) {
    const auto& own = insts_of_topic[topic[a]];
    if (!own.empty() && rng.uniform() < cfg.institution_purity)
      inst[a] = pick_from(rng, own);
    else
      inst[a] = rng.below(I);
  }

  std::vector<std::vector<int>> members(I);
  for (int a = 0; a < S; ++a) members[inst[a]].push_back(a);

  // co-authorship: first author round-robin, extra authors drawn from own
  // institution, then own topic, then anywhere
  std::vector<std::vector<int>> authors(P);
  std::vector<std::set<int>> coauthors(S);
  std::vector<std::vector<int>> topic_members(T);
  for (int a = 0; a < S; ++a) topic_members[topic[a]].push_back(a);

  for (int p = 0; p < P; ++p) {
    const int a0 = p % S;
    std::vector<int> team{a0};
    const int extra = 1 + (rng.uniform() < cfg.three_author_prob ? 1 : 0);
    for (int e = 0; e < extra; ++e) {
      const double r = rng.uniform();
      std::vector<int> pool;
      auto excluded = [&](int x) {
        return std::find(team.begin(), team.end(), x) != team.end();
      };
      if (r < cfg.co_location) {
        for (int x : members[inst[a0]])
          if (!excluded(x)) pool.push_back(x);
      } else if (r < cfg.co_location + cfg.intra_topic) {
        for (int x : topic_members[topic[a0]])
          if (!excluded(x) && inst[x] != inst[a0]) pool.push_back(x);
      }
      if (pool.empty()) {
        for (int x = 0; x < S; ++x)
          if (!excluded(x)) pool.push_back(x);
      }
      if (pool.empty()) break;  // single-scholar graph
      team.push_back(pick_from(rng, pool));
    }
    std::sort(team.begin(), team.end());
    team.erase(std::unique(team.begin(), team.end()), team.end());
    authors[p] = team;
    for (int x : team)
      for (int y : team)
        if (x != y) coauthors[x].insert(y);
  }

  // paper features: first author's topic centroid plus Gaussian noise,
  // normalized; centroids are orthogonal basis vectors
  Tensor paper_feat(P, cfg.feature_dim);
  for (int p = 0; p < P; ++p) {
    auto row = paper_feat.row(p);
    for (int j = 0; j < cfg.feature_dim; ++j) row[j] = rng.normal(0.0, cfg.noise_sigma);
    row[topic[authors[p].front()]] += 1.0;
    double norm = 0.0;
    for (double x : row) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : row) x /= norm;
  }

  Tensor scholar_feat(S, cfg.feature_dim);
  {
    std::vector<int> count(S, 0);
    for (int p = 0; p < P; ++p)
      for (int a : authors[p]) {
        for (int j = 0; j < cfg.feature_dim; ++j) scholar_feat.at(a, j) += paper_feat.at(p, j);
        ++count[a];
      }
    for (int a = 0; a < S; ++a)
      if (count[a] > 0)
        for (int j = 0; j < cfg.feature_dim; ++j) scholar_feat.at(a, j) /= count[a];
  }

  // held-out truth
  std::map<int, int> truth;
  for (int a = 0; a < S; ++a) {
    if (!coauthors[a].empty() && rng.uniform() < cfg.p_move) {
      std::vector<int> cs(coauthors[a].begin(), coauthors[a].end());
      truth[a] = inst[pick_from(rng, cs)];
    } else {
      truth[a] = rng.below(I);
    }
  }

  GraphBuilder b;
  for (int a = 0; a < S; ++a) b.add_node("author", padded_id('a', a, S));
  for (int p = 0; p < P; ++p) b.add_node("paper", padded_id('p', p, P));
  for (int j = 0; j < I; ++j) b.add_node("institution", padded_id('i', j, I));
  for (int p = 0; p < P; ++p)
    for (int a : authors[p]) b.add_edge("writes", padded_id('a', a, S), padded_id('p', p, P));
  for (int a = 0; a < S; ++a)
    b.add_edge("works-with", padded_id('a', a, S), padded_id('i', inst[a], I));
  for (int a = 0; a < S; ++a)
    b.add_feature_row("author", padded_id('a', a, S),
                      {scholar_feat.row(a).begin(), scholar_feat.row(a).end()});
  for (int p = 0; p < P; ++p)
    b.add_feature_row("paper", padded_id('p', p, P),
                      {paper_feat.row(p).begin(), paper_feat.row(p).end()});
  Tensor inst_feat = one_hot_institutions(I);
  for (int j = 0; j < I; ++j)
    b.add_feature_row("institution", padded_id('i', j, I),
                      {inst_feat.row(j).begin(), inst_feat.row(j).end()});

  SynthResult out{b.build(), std::move(truth), std::move(topic)};
  // zero-padded ids sort in generation order, so index k is scholar k
  return out;
}

SynthResult write_synth_dataset(const SynthConfig& cfg, const std::filesystem::path& dir) {
  SynthResult r = generate(cfg);
  std::filesystem::create_directories(dir);
  const HeteroGraph& g = r.graph;
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId paper = g.registry().node_type("paper");
  const NodeTypeId institution = g.registry().node_type("institution");

  {
    std::ofstream nodes(dir / "nodes.tsv");
    for (NodeTypeId t : {author, paper, institution})
      for (const std::string& id : g.external_ids(t))
        nodes << id << '\t' << g.registry().node_type_name(t) << '\n';
  }
  {
    std::ofstream edges(dir / "edges.tsv");
    const EdgeTypeId writes = g.registry().edge_type("writes");
    const EdgeTypeId works = g.registry().edge_type("works-with");
    for (int a = 0; a < g.node_count(author); ++a)
      for (int p : g.neighbors(writes, author, a))
        edges << g.external_id(author, a) << '\t' << g.external_id(paper, p) << "\twrites\n";
    for (int a = 0; a < g.node_count(author); ++a)
      for (int j : g.neighbors(works, author, a))
        edges << g.external_id(author, a) << '\t' << g.external_id(institution, j)
              << "\tworks-with\n";
  }
  write_features_tsv(dir / "features_author.tsv", g.external_ids(author), g.features(author));
  write_features_tsv(dir / "features_paper.tsv", g.external_ids(paper), g.features(paper));
  write_features_tsv(dir / "features_institution.tsv", g.external_ids(institution),
                     g.features(institution));
  {
    std::ofstream truth(dir / "truth.tsv");
    for (const auto& [a, j] : r.truth)
      truth << g.external_id(author, a) << '\t' << g.external_id(institution, j) << '\n';
  }
  {
    std::ofstream topics(dir / "topics.tsv");
    for (int a = 0; a < g.node_count(author); ++a)
      topics << g.external_id(author, a) << '\t' << r.topic[a] << '\n';
  }
  return r;
}

}  // namespace hgrec
