#include "hgrec/features.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "hgrec/errors.hpp"
#include "hgrec/rng.hpp"
#include "hgrec/tsv.hpp"

namespace hgrec {

Tensor aggregate_scholar_features(const std::vector<Tensor>& paper_vectors) {
  if (paper_vectors.empty())
    throw DataError("scholar has no paper vectors to aggregate");
  const int d = paper_vectors.front().cols;
  for (const Tensor& t : paper_vectors) {
    if (t.rows != 1 || t.cols != d)
      throw DataError("paper vector dimension mismatch: expected 1x" + std::to_string(d) +
                      ", got " + t.shape_str());
  }
  Tensor mean(1, d);
  for (const Tensor& t : paper_vectors)
    for (int j = 0; j < d; ++j) mean.v[j] += t.v[j];
  for (double& x : mean.v) x /= static_cast<double>(paper_vectors.size());
  return mean;
}

namespace {

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

Tensor hash_embed(std::string_view text, int dim, uint64_t seed) {
  if (dim < 1) throw DataError("hash_embed: dimension must be positive");
  Tensor out(1, dim);
  size_t i = 0;
  bool any = false;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const uint64_t h = mix_seed(seed, fnv1a64(tok));
      const int idx = static_cast<int>(h % static_cast<uint64_t>(dim));
      out.v[idx] += (h >> 63) ? 1.0 : -1.0;
      any = true;
    }
    i = j;
  }
  if (!any) return out;  // zero vector for empty text
  double norm = 0.0;
  for (double x : out.v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : out.v) x /= norm;
  return out;
}

Tensor one_hot_institutions(int count) {
  if (count < 1) throw DataError("one_hot_institutions: count must be positive");
  return Tensor::identity(count);
}

std::vector<std::pair<std::string, std::string>> read_abstracts_tsv(
    const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& rec : read_tsv(path, 2))
    out.emplace_back(rec.fields[0], tsv_unescape(rec.fields[1]));
  return out;
}

void write_features_tsv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                        const Tensor& features) {
  if (static_cast<int>(ids.size()) != features.rows)
    throw DataError("write_features_tsv: id count does not match feature rows");
  std::ofstream outf(path);
  if (!outf) throw DataError("cannot write " + path.string());
  outf.precision(17);
  for (int i = 0; i < features.rows; ++i) {
    outf << ids[i] << '\t';
    for (int j = 0; j < features.cols; ++j) {
      if (j) outf << ',';
      outf << features.at(i, j);
    }
    outf << '\n';
  }
}

BuiltFeatures build_features_from_abstracts(
    const HeteroGraph& g, const std::vector<std::pair<std::string, std::string>>& abstracts,
    int dim, uint64_t seed) {
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId paper = g.registry().node_type("paper");
  const NodeTypeId institution = g.registry().node_type("institution");
  const EdgeTypeId writes = g.registry().edge_type("writes");

  BuiltFeatures out;
  out.papers = Tensor(g.node_count(paper), dim);
  std::vector<char> covered(g.node_count(paper), 0);
  for (const auto& [id, text] : abstracts) {
    auto ref = g.find_node(id);
    if (!ref || ref->type != paper)
      throw DataError("abstract for unknown paper id '" + id + "'");
    Tensor v = hash_embed(text, dim, seed);
    if (covered[ref->index]) throw DataError("duplicate abstract for paper id '" + id + "'");
    covered[ref->index] = 1;
    std::copy(v.v.begin(), v.v.end(), out.papers.row(ref->index).begin());
    double norm = 0.0;
    for (double x : v.v) norm += x * x;
    if (norm == 0.0) out.warnings.push_back("empty abstract for paper id '" + id + "'");
  }
  for (int p = 0; p < g.node_count(paper); ++p)
    if (!covered[p]) out.warnings.push_back("paper id '" + g.external_id(paper, p) +
                                            "' has no abstract; features left zero");

  out.scholars = Tensor(g.node_count(author), dim);
  for (int a = 0; a < g.node_count(author); ++a) {
    const auto& ps = g.neighbors(writes, author, a);
    if (ps.empty()) {
      out.warnings.push_back("scholar id '" + g.external_id(author, a) +
                             "' has no papers; features left zero");
      continue;
    }
    std::vector<Tensor> vecs;
    vecs.reserve(ps.size());
    for (int p : ps) vecs.push_back(Tensor::row_vector(out.papers.row(p)));
    Tensor mean = aggregate_scholar_features(vecs);
    std::copy(mean.v.begin(), mean.v.end(), out.scholars.row(a).begin());
  }

  out.institutions = one_hot_institutions(g.node_count(institution));
  return out;
}

}  // namespace hgrec
