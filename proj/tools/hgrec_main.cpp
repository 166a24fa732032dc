#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgrec/checkpoint.hpp"
#include "hgrec/config.hpp"
#include "hgrec/errors.hpp"
#include "hgrec/explain.hpp"
#include "hgrec/features.hpp"
#include "hgrec/infomax.hpp"
#include "hgrec/metrics.hpp"
#include "hgrec/recommend.hpp"
#include "hgrec/synth.hpp"

namespace fs = std::filesystem;
using namespace hgrec;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerics = 4;

struct CommonFlags {
  std::string config_file;
  RunConfig cfg;
};

void add_common(CLI::App* cmd, CommonFlags& c) {
  cmd->add_option("--config", c.config_file, "key = value config file; flags override it");
  cmd->add_option("--seed", c.cfg.seed, "random seed");
  cmd->add_flag("--deterministic,!--no-deterministic", c.cfg.deterministic,
                "fixed-order single-threaded execution (default on)");
  cmd->add_option("--out", c.cfg.out_dir, "output directory");
}

void add_graph_paths(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--nodes", cfg.nodes, "nodes TSV: external_id <TAB> type_name");
  cmd->add_option("--edges", cfg.edges, "edges TSV: src <TAB> dst <TAB> edge_type");
  cmd->add_option("--features-author", cfg.features_author, "scholar features TSV");
  cmd->add_option("--features-paper", cfg.features_paper, "paper features TSV");
  cmd->add_option("--features-institution", cfg.features_institution, "institution features TSV");
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dim", cfg.embed_dim, "embedding dimension (heads x head dim)");
  cmd->add_option("--heads", cfg.num_heads, "attention heads per meta-path");
  cmd->add_option("--sem-hidden", cfg.sem_hidden, "semantic attention hidden dimension");
  cmd->add_option("--slope", cfg.slope, "LeakyReLU slope");
  cmd->add_option("--metapaths", cfg.metapaths, "meta-paths to use (default APA AIA)");
}

void require_paths(const std::vector<std::pair<std::string, fs::path>>& entries) {
  for (const auto& [flag, p] : entries) {
    if (p.empty()) throw ConfigError("missing required input: " + flag);
    if (!fs::exists(p)) throw ConfigError(flag + ": path does not exist: " + p.string());
  }
}

HeteroGraph load_run_graph(const RunConfig& cfg, bool need_author_features) {
  require_paths({{"--nodes", cfg.nodes}, {"--edges", cfg.edges}});
  if (need_author_features) require_paths({{"--features-author", cfg.features_author}});
  LoadOptions opts;
  opts.allowed_node_types = {"author", "paper", "institution"};
  opts.allowed_edge_types = {"writes", "works-with"};
  return load_graph(cfg.graph_sources(), opts);
}

void write_train_log(const fs::path& path, const std::vector<EpochLog>& log,
                     const std::vector<std::string>& metapaths) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const EpochLog& e : log) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    nlohmann::ordered_json omega;
    for (size_t p = 0; p < metapaths.size(); ++p) omega[metapaths[p]] = e.omega[p];
    j["omega"] = omega;
    nlohmann::ordered_json raw;
    for (size_t p = 0; p < metapaths.size(); ++p) raw[metapaths[p]] = e.omega_raw[p];
    j["omega_raw"] = raw;
    j["wall_ms"] = e.wall_ms;
    out << j.dump() << "\n";
  }
}

int run_synth(const CommonFlags& c, const SynthConfig& scfg_in) {
  SynthConfig scfg = scfg_in;
  scfg.seed = c.cfg.seed;
  fs::create_directories(c.cfg.out_dir);
  write_synth_dataset(scfg, c.cfg.out_dir);
  std::cout << "wrote synthetic dataset (" << scfg.scholars << " scholars, " << scfg.papers
            << " papers, " << scfg.institutions << " institutions) to " << c.cfg.out_dir.string()
            << "\n";
  return 0;
}

int run_ingest(const CommonFlags& c, const fs::path& abstracts_path, int dim) {
  RunConfig cfg = c.cfg;
  require_paths({{"--nodes", cfg.nodes},
                 {"--edges", cfg.edges},
                 {"--abstracts", abstracts_path}});
  LoadOptions opts;
  opts.allowed_node_types = {"author", "paper", "institution"};
  opts.allowed_edge_types = {"writes", "works-with"};
  HeteroGraph g = load_graph({cfg.nodes, cfg.edges, {}}, opts);
  BuiltFeatures f =
      build_features_from_abstracts(g, read_abstracts_tsv(abstracts_path), dim, cfg.seed);
  for (const std::string& w : f.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(cfg.out_dir);
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId paper = g.registry().node_type("paper");
  const NodeTypeId institution = g.registry().node_type("institution");
  write_features_tsv(cfg.out_dir / "features_author.tsv", g.external_ids(author), f.scholars);
  write_features_tsv(cfg.out_dir / "features_paper.tsv", g.external_ids(paper), f.papers);
  write_features_tsv(cfg.out_dir / "features_institution.tsv", g.external_ids(institution),
                     f.institutions);
  std::cout << "wrote feature files for " << g.node_count(author) << " scholars to "
            << cfg.out_dir.string() << "\n";
  return 0;
}

int run_train(const CommonFlags& c, int epochs_flag, double lr_flag) {
  RunConfig cfg = c.cfg;
  cfg.epochs = epochs_flag;
  cfg.lr = lr_flag;
  HeteroGraph g = load_run_graph(cfg, true);
  TrainResult r = train(g, cfg.train_config());
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(cfg.out_dir);
  const fs::path ckpt =
      cfg.checkpoint.empty() ? cfg.out_dir / "checkpoint.json" : cfg.checkpoint;
  save_checkpoint(ckpt, r.model);
  write_train_log(cfg.out_dir / "train_log.jsonl", r.log, cfg.metapaths);
  double final_loss = r.log.empty() ? 0.0 : r.log.back().loss;
  std::cout << "trained " << cfg.epochs << " epochs; final loss " << final_loss
            << "; checkpoint " << ckpt.string() << "\n";
  return 0;
}

struct CheckpointRun {
  HeteroGraph graph;
  ScholarEmbeddingModel model;
  Tensor embeddings;
  AttentionTrace trace;
};

CheckpointRun load_and_embed(const RunConfig& cfg) {
  require_paths({{"--checkpoint", cfg.checkpoint}});
  HeteroGraph g = load_run_graph(cfg, true);
  ScholarEmbeddingModel model = load_checkpoint(cfg.checkpoint);
  LoadedCheckpoint header = read_checkpoint_header(cfg.checkpoint);
  auto [z, trace] = embed_with_trace(model, g, header.metapaths);
  return {std::move(g), std::move(model), std::move(z), std::move(trace)};
}

int run_recommend(const CommonFlags& c, const std::string& scholar_id, double topk_percent) {
  RunConfig cfg = c.cfg;
  CheckpointRun run = load_and_embed(cfg);
  const HeteroGraph& g = run.graph;
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId institution = g.registry().node_type("institution");
  AffiliationIndex aff = AffiliationIndex::build(g);
  InstitutionProfiles profiles = institution_profiles(run.embeddings, aff);
  for (const std::string& w : profiles.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<int> scholars;
  if (!scholar_id.empty()) {
    auto ref = g.find_node(scholar_id);
    if (!ref || ref->type != author)
      throw DataError("unknown scholar id '" + scholar_id + "'");
    scholars.push_back(ref->index);
  } else {
    for (int a = 0; a < g.node_count(author); ++a) scholars.push_back(a);
  }

  fs::create_directories(cfg.out_dir);
  const fs::path out_path = cfg.out_dir / "recommendations.jsonl";
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path.string());
  const ProfileScoring scoring = cfg.eval_config().scoring;
  for (int a : scholars) {
    PreferenceList pre = preference_list(a, run.embeddings, profiles, aff, g, scoring);
    if (pre.dot_fallback)
      std::cerr << "warning: scholar '" << g.external_id(author, a)
                << "' has a zero-norm embedding; ranked by dot product\n";
    std::vector<int> top = recommend_topk(pre, topk_percent);
    nlohmann::ordered_json j;
    j["scholar"] = g.external_id(author, a);
    nlohmann::ordered_json insts, scores;
    for (int k = 0; k < static_cast<int>(top.size()); ++k) {
      insts.push_back(g.external_id(institution, pre.entries[k].institution));
      scores.push_back(pre.entries[k].score);
    }
    j["institutions"] = insts;
    j["scores"] = scores;
    out << j.dump() << "\n";
  }
  std::cout << "wrote recommendations for " << scholars.size() << " scholars to "
            << out_path.string() << "\n";
  return 0;
}

int run_evaluate(const CommonFlags& c) {
  RunConfig cfg = c.cfg;
  require_paths({{"--truth", cfg.truth}});
  CheckpointRun run = load_and_embed(cfg);
  GroundTruth truth = load_truth_tsv(cfg.truth, run.graph);
  MetricsReport rep = evaluate(run.graph, run.embeddings, truth, cfg.eval_config());
  fs::create_directories(cfg.out_dir);
  const fs::path out_path = cfg.out_dir / "metrics.json";
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path.string());
  out << rep.to_json();
  std::cout << rep.to_table();
  std::cout << "metrics written to " << out_path.string() << "\n";
  return 0;
}

int run_explain(const CommonFlags& c, const std::string& scholar_id,
                const std::string& institution_id, int top_n, bool as_json, bool per_head) {
  RunConfig cfg = c.cfg;
  CheckpointRun run = load_and_embed(cfg);
  const HeteroGraph& g = run.graph;
  const NodeTypeId author = g.registry().node_type("author");
  const NodeTypeId institution = g.registry().node_type("institution");
  auto ref = g.find_node(scholar_id);
  if (!ref || ref->type != author) throw DataError("unknown scholar id '" + scholar_id + "'");
  AffiliationIndex aff = AffiliationIndex::build(g);

  if (!institution_id.empty()) {
    auto iref = g.find_node(institution_id);
    if (!iref || iref->type != institution)
      throw DataError("unknown institution id '" + institution_id + "'");
    Explanation ex = explain_recommendation(ref->index, iref->index, run.trace, run.embeddings,
                                            g, aff);
    std::cout << (as_json ? ex.to_json() : ex.to_text());
    return 0;
  }

  // no institution: report attention neighborhoods and meta-path weights
  nlohmann::ordered_json j;
  j["scholar"] = scholar_id;
  nlohmann::ordered_json paths;
  for (size_t p = 0; p < run.trace.path_names.size(); ++p) {
    nlohmann::ordered_json pj;
    pj["name"] = run.trace.path_names[p];
    pj["raw_score"] = run.trace.omega_raw[p];
    pj["weight"] = run.trace.omega[p];
    auto emit = [&](int head) {
      nlohmann::ordered_json arr;
      for (const auto& [nb, alpha] :
           top_attention_neighbors(run.trace, static_cast<int>(p), ref->index, top_n, g, head)) {
        nlohmann::ordered_json e;
        e["neighbor"] = g.external_id(author, nb);
        e["alpha"] = alpha;
        arr.push_back(e);
      }
      return arr;
    };
    pj["top_neighbors"] = emit(-1);
    if (per_head) {
      nlohmann::ordered_json heads;
      for (int k = 0; k < static_cast<int>(run.trace.head_alpha[p].size()); ++k)
        heads.push_back(emit(k));
      pj["per_head"] = heads;
    }
    paths.push_back(pj);
  }
  j["metapaths"] = paths;
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "scholar " << scholar_id << "\n";
    for (const auto& pj : j["metapaths"]) {
      std::cout << "  " << pj["name"].get<std::string>() << "  weight "
                << pj["weight"].get<double>() << " (raw " << pj["raw_score"].get<double>()
                << ")\n";
      for (const auto& e : pj["top_neighbors"])
        std::cout << "    " << e["neighbor"].get<std::string>() << "  alpha "
                  << e["alpha"].get<double>() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous scholarly network embedding and institution recommendation"};
  app.require_subcommand(1);

  CommonFlags common;
  SynthConfig scfg;
  fs::path abstracts_path;
  int ingest_dim = 64;
  int epochs = 10;
  double lr = 1e-3;
  std::string scholar_id, institution_id;
  double topk_percent = 10.0;
  int top_n = 5;
  bool as_json = false, per_head = false;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scholarly network");
  add_common(synth, common);
  synth->add_option("--scholars", scfg.scholars, "scholar count");
  synth->add_option("--papers", scfg.papers, "paper count");
  synth->add_option("--institutions", scfg.institutions, "institution count");
  synth->add_option("--topics", scfg.topics, "hidden topic count");
  synth->add_option("--p-move", scfg.p_move, "probability the truth follows a collaborator");
  synth->add_option("--co-location", scfg.co_location, "coauthor from own institution");
  synth->add_option("--intra-topic", scfg.intra_topic, "coauthor from own topic");
  synth->add_option("--purity", scfg.institution_purity, "scholar placed at own-topic institution");
  synth->add_option("--noise", scfg.noise_sigma, "feature noise sigma");
  synth->add_option("--feature-dim", scfg.feature_dim, "feature dimension");
  synth->add_option("--three-author-prob", scfg.three_author_prob, "three-author paper rate");

  CLI::App* ingest = app.add_subcommand("ingest", "build features from abstracts");
  add_common(ingest, common);
  add_graph_paths(ingest, common.cfg);
  ingest->add_option("--abstracts", abstracts_path, "abstracts TSV: paper_id <TAB> text");
  ingest->add_option("--feature-dim", ingest_dim, "document embedding dimension");

  CLI::App* train_cmd = app.add_subcommand("train", "train embeddings on a graph");
  add_common(train_cmd, common);
  add_graph_paths(train_cmd, common.cfg);
  add_model_flags(train_cmd, common.cfg);
  train_cmd->add_option("--checkpoint", common.cfg.checkpoint, "checkpoint output path");
  train_cmd->add_option("--epochs", epochs, "training epochs");
  train_cmd->add_option("--lr", lr, "Adam learning rate");

  CLI::App* recommend_cmd = app.add_subcommand("recommend", "rank institutions per scholar");
  add_common(recommend_cmd, common);
  add_graph_paths(recommend_cmd, common.cfg);
  recommend_cmd->add_option("--checkpoint", common.cfg.checkpoint, "trained checkpoint");
  recommend_cmd->add_option("--scholar", scholar_id, "single scholar external id");
  recommend_cmd->add_option("--topk", topk_percent, "list truncation percentage");
  recommend_cmd->add_flag("--max-member", common.cfg.max_member_scoring,
                          "score by best member instead of member mean");

  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "AUC and HR@K against held-out truth");
  add_common(evaluate_cmd, common);
  add_graph_paths(evaluate_cmd, common.cfg);
  evaluate_cmd->add_option("--checkpoint", common.cfg.checkpoint, "trained checkpoint");
  evaluate_cmd->add_option("--truth", common.cfg.truth, "truth TSV: scholar <TAB> institution");
  std::string k_grid_csv;
  evaluate_cmd->add_option("--k-grid", k_grid_csv, "comma-separated HR percentages");
  evaluate_cmd->add_flag("--pooled-auc", common.cfg.pooled_auc, "pool pairs across scholars");
  evaluate_cmd->add_flag("--max-member", common.cfg.max_member_scoring,
                         "score by best member instead of member mean");

  CLI::App* explain_cmd = app.add_subcommand("explain", "attention behind a recommendation");
  add_common(explain_cmd, common);
  add_graph_paths(explain_cmd, common.cfg);
  explain_cmd->add_option("--checkpoint", common.cfg.checkpoint, "trained checkpoint");
  explain_cmd->add_option("--scholar", scholar_id, "scholar external id")->required();
  explain_cmd->add_option("--institution", institution_id, "explain this recommendation");
  explain_cmd->add_option("--top", top_n, "neighbors to list per meta-path");
  explain_cmd->add_flag("--json", as_json, "JSON output");
  explain_cmd->add_flag("--per-head", per_head, "per-head attention detail");

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();

  try {
    if (!common.config_file.empty()) {
      // file values fill in everything the user did not pass as a flag
      RunConfig merged;
      apply_config_file(merged, common.config_file);
      auto flag_set = [&](const std::string& name) {
        const CLI::Option* opt = active->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      auto keep_path = [&](const std::string& name, const fs::path& flag_value, fs::path& out) {
        if (flag_set(name)) out = flag_value;
      };
      keep_path("--nodes", common.cfg.nodes, merged.nodes);
      keep_path("--edges", common.cfg.edges, merged.edges);
      keep_path("--features-author", common.cfg.features_author, merged.features_author);
      keep_path("--features-paper", common.cfg.features_paper, merged.features_paper);
      keep_path("--features-institution", common.cfg.features_institution,
                merged.features_institution);
      keep_path("--truth", common.cfg.truth, merged.truth);
      keep_path("--checkpoint", common.cfg.checkpoint, merged.checkpoint);
      keep_path("--out", common.cfg.out_dir, merged.out_dir);
      if (flag_set("--dim")) merged.embed_dim = common.cfg.embed_dim;
      if (flag_set("--heads")) merged.num_heads = common.cfg.num_heads;
      if (flag_set("--sem-hidden")) merged.sem_hidden = common.cfg.sem_hidden;
      if (flag_set("--slope")) merged.slope = common.cfg.slope;
      if (flag_set("--metapaths")) merged.metapaths = common.cfg.metapaths;
      if (flag_set("--seed")) merged.seed = common.cfg.seed;
      if (flag_set("--deterministic") || flag_set("--no-deterministic"))
        merged.deterministic = common.cfg.deterministic;
      if (flag_set("--pooled-auc")) merged.pooled_auc = common.cfg.pooled_auc;
      if (flag_set("--max-member")) merged.max_member_scoring = common.cfg.max_member_scoring;
      common.cfg = merged;
    }
    if (!k_grid_csv.empty()) common.cfg.k_grid = parse_k_grid(k_grid_csv);

    if (synth->parsed()) return run_synth(common, scfg);
    if (ingest->parsed()) return run_ingest(common, abstracts_path, ingest_dim);
    if (train_cmd->parsed()) {
      if (!train_cmd->count("--epochs")) epochs = common.cfg.epochs;
      if (!train_cmd->count("--lr")) lr = common.cfg.lr;
      if (epochs == 0) std::cerr << "warning: epochs = 0, writing untrained parameters\n";
      return run_train(common, epochs, lr);
    }
    if (recommend_cmd->parsed()) return run_recommend(common, scholar_id, topk_percent);
    if (evaluate_cmd->parsed()) return run_evaluate(common);
    if (explain_cmd->parsed())
      return run_explain(common, scholar_id, institution_id, top_n, as_json, per_head);
  } catch (const ConfigError& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GraphError& e) {
    std::cerr << "error [graph]: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error [data]: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericsError& e) {
    std::cerr << "error [numerics]: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
