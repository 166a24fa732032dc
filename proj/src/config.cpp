#include "hgrec/config.hpp"

#include <charconv>
#include <fstream>

#include "hgrec/errors.hpp"

namespace hgrec {

ModelConfig RunConfig::model_config() const {
  if (num_heads < 1 || embed_dim < 1 || sem_hidden < 1)
    throw ConfigError("model dimensions must be positive");
  if (embed_dim % num_heads != 0)
    throw ConfigError("embedding dimension " + std::to_string(embed_dim) +
                      " is not divisible by the head count " + std::to_string(num_heads));
  ModelConfig m;
  m.head_dim = embed_dim / num_heads;
  m.num_heads = num_heads;
  m.sem_hidden = sem_hidden;
  m.slope = slope;
  return m;
}

TrainConfig RunConfig::train_config() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (lr < 0) throw ConfigError("learning rate must be non-negative");
  TrainConfig t;
  t.epochs = epochs;
  t.adam = {lr, beta1, beta2, adam_eps};
  t.seed = seed;
  t.deterministic = deterministic;
  t.model = model_config();
  t.metapaths = metapaths;
  return t;
}

EvalConfig RunConfig::eval_config() const {
  if (k_grid.empty()) throw ConfigError("k grid must not be empty");
  for (double k : k_grid)
    if (k <= 0 || k > 100) throw ConfigError("k grid percentages must lie in (0, 100]");
  EvalConfig e;
  e.k_grid = k_grid;
  e.pooled_auc = pooled_auc;
  e.scoring = max_member_scoring ? ProfileScoring::kMaxMemberCosine : ProfileScoring::kMeanCosine;
  return e;
}

GraphSources RunConfig::graph_sources() const {
  GraphSources s;
  s.nodes = nodes;
  s.edges = edges;
  if (!features_author.empty()) s.features.emplace_back("author", features_author);
  if (!features_paper.empty()) s.features.emplace_back("paper", features_paper);
  if (!features_institution.empty()) s.features.emplace_back("institution", features_institution);
  return s;
}

std::vector<double> parse_k_grid(const std::string& csv) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    std::string tok = csv.substr(start, comma == std::string::npos ? comma : comma - start);
    double x = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ConfigError("bad k grid entry '" + tok + "'");
    out.push_back(x);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                         (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& v, const std::string& key) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  return x;
}

int to_int(const std::string& v, const std::string& key) {
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= v.size()) {
    size_t comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = unquote(trim(t.substr(eq + 1)));

    if (key == "paths.nodes") cfg.nodes = value;
    else if (key == "paths.edges") cfg.edges = value;
    else if (key == "paths.features.author") cfg.features_author = value;
    else if (key == "paths.features.paper") cfg.features_paper = value;
    else if (key == "paths.features.institution") cfg.features_institution = value;
    else if (key == "paths.truth") cfg.truth = value;
    else if (key == "paths.checkpoint") cfg.checkpoint = value;
    else if (key == "paths.out_dir") cfg.out_dir = value;
    else if (key == "model.embed_dim") cfg.embed_dim = to_int(value, key);
    else if (key == "model.num_heads") cfg.num_heads = to_int(value, key);
    else if (key == "model.sem_hidden") cfg.sem_hidden = to_int(value, key);
    else if (key == "model.slope") cfg.slope = to_double(value, key);
    else if (key == "train.epochs") cfg.epochs = to_int(value, key);
    else if (key == "train.lr") cfg.lr = to_double(value, key);
    else if (key == "train.beta1") cfg.beta1 = to_double(value, key);
    else if (key == "train.beta2") cfg.beta2 = to_double(value, key);
    else if (key == "train.adam_eps") cfg.adam_eps = to_double(value, key);
    else if (key == "train.seed") cfg.seed = static_cast<uint64_t>(to_int(value, key));
    else if (key == "train.deterministic") cfg.deterministic = to_bool(value, key);
    else if (key == "eval.k_grid") cfg.k_grid = parse_k_grid(value);
    else if (key == "eval.pooled_auc") cfg.pooled_auc = to_bool(value, key);
    else if (key == "eval.max_member_scoring") cfg.max_member_scoring = to_bool(value, key);
    else if (key == "metapaths") cfg.metapaths = split_csv(value);
    else
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                        "'");
  }
}

}  // namespace hgrec
