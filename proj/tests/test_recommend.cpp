#include <doctest.h>

#include <algorithm>

#include "hgrec/errors.hpp"
#include "hgrec/recommend.hpp"
#include "hgrec/rng.hpp"
#include "hgrec/synth.hpp"

using namespace hgrec;

namespace {

// three institutions, five scholars; a0,a1 at i0, a2 at i1, a3,a4 at i2
HeteroGraph membership_graph() {
  GraphBuilder b;
  for (int a = 0; a < 5; ++a) b.add_node("author", "a" + std::to_string(a));
  for (int i = 0; i < 3; ++i) b.add_node("institution", "i" + std::to_string(i));
  b.add_edge("works-with", "a0", "i0");
  b.add_edge("works-with", "a1", "i0");
  b.add_edge("works-with", "a2", "i1");
  b.add_edge("works-with", "a3", "i2");
  b.add_edge("works-with", "a4", "i2");
  return b.build();
}

}  // namespace

TEST_CASE("affiliation index mirrors works-with edges") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  CHECK(aff.scholar_institution == std::vector<int>{0, 0, 1, 2, 2});
  CHECK(aff.institution_members[0] == std::vector<int>{0, 1});
  CHECK(aff.institution_members[1] == std::vector<int>{2});
}

TEST_CASE("scholars without exactly one affiliation are rejected") {
  GraphBuilder b;
  b.add_node("author", "a0");
  b.add_node("author", "a1");
  b.add_node("institution", "i0");
  b.add_node("institution", "i1");
  b.add_edge("works-with", "a0", "i0");
  b.add_edge("works-with", "a0", "i1");  // two affiliations
  b.add_edge("works-with", "a1", "i0");
  HeteroGraph g = b.build();
  CHECK_THROWS_AS(AffiliationIndex::build(g), GraphError);
}

TEST_CASE("institution profile of a single member is that member's embedding") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  Tensor z = Tensor::from_rows({{1, 0}, {0, 1}, {2, 3}, {1, 1}, {-1, -1}});
  InstitutionProfiles p = institution_profiles(z, aff);
  CHECK(p.profiles.at(1, 0) == 2.0);
  CHECK(p.profiles.at(1, 1) == 3.0);
  // mean of a0, a1
  CHECK(p.profiles.at(0, 0) == doctest::Approx(0.5));
  CHECK(p.profiles.at(0, 1) == doctest::Approx(0.5));
  // opposite members cancel
  CHECK(p.profiles.at(2, 0) == 0.0);
}

TEST_CASE("memberless institutions are excluded with a warning") {
  GraphBuilder b;
  b.add_node("author", "a0");
  b.add_node("institution", "i0");
  b.add_node("institution", "i1");
  b.add_edge("works-with", "a0", "i0");
  HeteroGraph g = b.build();
  AffiliationIndex aff = AffiliationIndex::build(g);
  Tensor z = Tensor::from_rows({{1.0, 2.0}});
  InstitutionProfiles p = institution_profiles(z, aff);
  CHECK(p.has_profile[0] == 1);
  CHECK(p.has_profile[1] == 0);
  CHECK(!p.warnings.empty());
  PreferenceList pre = preference_list(0, z, p, aff, g);
  CHECK(pre.entries.size() == 1);  // the empty institution is not ranked
}

TEST_CASE("preference list ranks the matching profile first") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  // a2's embedding equals i2's profile direction and is orthogonal to others
  Tensor z = Tensor::from_rows({{1, 0, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 0}});
  InstitutionProfiles p = institution_profiles(z, aff);
  PreferenceList pre = preference_list(2, z, p, aff, g);
  CHECK(pre.entries[0].institution == 1);  // its own institution holds only itself
  CHECK(pre.entries[0].score == doctest::Approx(1.0));
}

TEST_CASE("identical profiles fall back to external-id order") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  Tensor z = Tensor::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
  InstitutionProfiles p = institution_profiles(z, aff);
  PreferenceList pre = preference_list(0, z, p, aff, g);
  CHECK(pre.entries[0].institution == 0);
  CHECK(pre.entries[1].institution == 1);
  CHECK(pre.entries[2].institution == 2);
}

TEST_CASE("preference list matches a brute-force similarity sort") {
  Rng rng(77);
  SynthConfig c;
  c.scholars = 25;
  c.papers = 40;
  c.institutions = 5;
  c.topics = 3;
  c.feature_dim = 8;
  c.seed = 31;
  SynthResult r = generate(c);
  AffiliationIndex aff = AffiliationIndex::build(r.graph);
  Tensor z(25, 6);
  for (double& x : z.v) x = rng.uniform(-1, 1);
  InstitutionProfiles p = institution_profiles(z, aff);

  for (int a = 0; a < 5; ++a) {
    PreferenceList pre = preference_list(a, z, p, aff, r.graph);
    std::vector<std::pair<double, int>> brute;
    for (int j = 0; j < 5; ++j) brute.push_back({-row_cosine(z, a, p.profiles, j), j});
    std::sort(brute.begin(), brute.end());
    for (size_t k = 0; k < brute.size(); ++k) CHECK(pre.entries[k].institution == brute[k].second);
    // permutation of the whole institution set
    std::vector<int> got;
    for (const auto& e : pre.entries) got.push_back(e.institution);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{0, 1, 2, 3, 4});
  }
}

TEST_CASE("cosine ranking is invariant to positive rescaling of embeddings") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  Rng rng(78);
  Tensor z(5, 4);
  for (double& x : z.v) x = rng.uniform(-1, 1);
  InstitutionProfiles p1 = institution_profiles(z, aff);
  PreferenceList a = preference_list(0, z, p1, aff, g);
  Tensor z2 = z;
  for (double& x : z2.v) x *= 3.7;
  InstitutionProfiles p2 = institution_profiles(z2, aff);
  PreferenceList b = preference_list(0, z2, p2, aff, g);
  for (size_t k = 0; k < a.entries.size(); ++k)
    CHECK(a.entries[k].institution == b.entries[k].institution);
}

TEST_CASE("zero-norm embeddings fall back to dot ranking and are flagged") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  Tensor z = Tensor::from_rows({{0, 0}, {1, 2}, {-1, 1}, {2, 0}, {0, 1}});
  InstitutionProfiles p = institution_profiles(z, aff);
  PreferenceList pre = preference_list(0, z, p, aff, g);
  CHECK(pre.dot_fallback);
  CHECK(pre.entries.size() == 3);
}

TEST_CASE("top-k truncation uses the ceiling rule") {
  PreferenceList pre;
  for (int j = 0; j < 10; ++j) pre.entries.push_back({j, 1.0 - 0.05 * j});
  CHECK(recommend_topk(pre, 25.0).size() == 3);  // ceil(2.5)
  CHECK(recommend_topk(pre, 100.0).size() == 10);
  CHECK(recommend_topk(pre, 5.0).size() == 1);
  CHECK_THROWS_AS(recommend_topk(pre, 0.0), DataError);
  CHECK_THROWS_AS(recommend_topk(pre, 120.0), DataError);

  PreferenceList hundred;
  for (int j = 0; j < 100; ++j) hundred.entries.push_back({j, 1.0 - 0.001 * j});
  CHECK(recommend_topk(hundred, 5.0).size() == 5);
}

TEST_CASE("top-k lists are monotone prefixes in K") {
  PreferenceList pre;
  for (int j = 0; j < 7; ++j) pre.entries.push_back({6 - j, 1.0 - 0.1 * j});
  std::vector<int> prev;
  for (double k : {10.0, 30.0, 60.0, 100.0}) {
    std::vector<int> cur = recommend_topk(pre, k);
    CHECK(cur.size() >= prev.size());
    CHECK(std::equal(prev.begin(), prev.end(), cur.begin()));
    prev = cur;
  }
}

TEST_CASE("max-member scoring picks the closest member") {
  HeteroGraph g = membership_graph();
  AffiliationIndex aff = AffiliationIndex::build(g);
  // query a2 sits alone at i1. i2 hosts one near-identical member and one
  // opposite member, i0 hosts two moderately close members: the member mean
  // prefers i0, the best single member prefers i2.
  Tensor z = Tensor::from_rows({{0.8, 0.6}, {0.6, 0.8}, {1.0, 0.0}, {0.99, 0.14}, {-1.0, 0.0}});
  InstitutionProfiles p = institution_profiles(z, aff);
  PreferenceList mean_pre = preference_list(2, z, p, aff, g, ProfileScoring::kMeanCosine);
  PreferenceList max_pre = preference_list(2, z, p, aff, g, ProfileScoring::kMaxMemberCosine);
  auto rank_of = [](const PreferenceList& pre, int inst) {
    for (size_t k = 0; k < pre.entries.size(); ++k)
      if (pre.entries[k].institution == inst) return static_cast<int>(k);
    return -1;
  };
  CHECK(rank_of(mean_pre, 0) < rank_of(mean_pre, 2));
  CHECK(rank_of(max_pre, 2) < rank_of(max_pre, 0));
}
