#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std;
namespace fs = std::filesystem;

namespace {

#ifndef HGREC_CLI_PATH
#define HGREC_CLI_PATH "./hgrec"
#endif

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path out_file = workdir / "cli_output.txt";
  const std::string cmd = std::string(HGREC_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("hgrec_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string graph_flags(const fs::path& data) {
  return " --nodes " + (data / "nodes.tsv").string() + " --edges " +
         (data / "edges.tsv").string() + " --features-author " +
         (data / "features_author.tsv").string() + " --features-paper " +
         (data / "features_paper.tsv").string() + " --features-institution " +
         (data / "features_institution.tsv").string();
}

}  // namespace

TEST_CASE("cli pipeline: synth, train, recommend, evaluate, explain") {
  fs::path dir = fresh_dir("pipeline");
  fs::path data = dir / "data";
  fs::path run = dir / "run";

  CliResult synth = run_cli("synth --seed 7 --scholars 30 --papers 45 --institutions 3 "
                            "--topics 2 --feature-dim 12 --out " + data.string(), dir);
  REQUIRE(synth.exit_code == 0);
  CHECK(fs::exists(data / "nodes.tsv"));
  CHECK(fs::exists(data / "truth.tsv"));

  CliResult train = run_cli("train" + graph_flags(data) +
                            " --dim 16 --heads 2 --sem-hidden 8 --epochs 4 --seed 3 --out " +
                            run.string(), dir);
  REQUIRE(train.exit_code == 0);
  REQUIRE(fs::exists(run / "checkpoint.json"));
  REQUIRE(fs::exists(run / "train_log.jsonl"));

  CliResult rec = run_cli("recommend" + graph_flags(data) + " --checkpoint " +
                          (run / "checkpoint.json").string() + " --topk 100 --out " +
                          run.string(), dir);
  REQUIRE(rec.exit_code == 0);
  const std::string recs = slurp(run / "recommendations.jsonl");
  CHECK(recs.find("\"scholar\"") != std::string::npos);

  CliResult eval = run_cli("evaluate" + graph_flags(data) + " --checkpoint " +
                           (run / "checkpoint.json").string() + " --truth " +
                           (data / "truth.tsv").string() + " --k-grid 50,100 --out " +
                           run.string(), dir);
  REQUIRE(eval.exit_code == 0);
  const std::string metrics = slurp(run / "metrics.json");
  CHECK(metrics.find("\"auc\"") != std::string::npos);
  CHECK(metrics.find("\"100%\"") != std::string::npos);
  CHECK(eval.output.find("AUC") != std::string::npos);

  CliResult expl = run_cli("explain" + graph_flags(data) + " --checkpoint " +
                           (run / "checkpoint.json").string() + " --scholar a00 --top 3 --json",
                           dir);
  REQUIRE(expl.exit_code == 0);
  CHECK(expl.output.find("\"metapaths\"") != std::string::npos);
}

TEST_CASE("cli: identical train runs produce identical checkpoints and metrics") {
  fs::path dir = fresh_dir("determinism");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 11 --scholars 25 --papers 40 --institutions 3 --topics 2 "
                  "--feature-dim 10 --out " + data.string(), dir).exit_code == 0);

  auto one_run = [&](const std::string& tag) {
    fs::path run = dir / tag;
    REQUIRE(run_cli("train" + graph_flags(data) +
                    " --dim 8 --heads 2 --sem-hidden 8 --epochs 3 --seed 5 --out " + run.string(),
                    dir).exit_code == 0);
    REQUIRE(run_cli("evaluate" + graph_flags(data) + " --checkpoint " +
                    (run / "checkpoint.json").string() + " --truth " +
                    (data / "truth.tsv").string() + " --out " + run.string(), dir).exit_code == 0);
    return std::make_pair(slurp(run / "checkpoint.json"), slurp(run / "metrics.json"));
  };
  auto [ckpt1, metrics1] = one_run("r1");
  auto [ckpt2, metrics2] = one_run("r2");
  CHECK(ckpt1 == ckpt2);
  CHECK(metrics1 == metrics2);
}

TEST_CASE("cli: train --epochs 0 writes an untrained checkpoint with a warning") {
  fs::path dir = fresh_dir("zero_epochs");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 2 --scholars 12 --papers 18 --institutions 3 --topics 2 "
                  "--feature-dim 8 --out " + data.string(), dir).exit_code == 0);
  CliResult train = run_cli("train" + graph_flags(data) +
                            " --dim 8 --heads 1 --epochs 0 --out " + (dir / "run").string(), dir);
  CHECK(train.exit_code == 0);
  CHECK(train.output.find("warning") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "checkpoint.json"));
}

TEST_CASE("cli: evaluate without a truth file fails with a named input") {
  fs::path dir = fresh_dir("missing_truth");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 2 --scholars 12 --papers 18 --institutions 3 --topics 2 "
                  "--feature-dim 8 --out " + data.string(), dir).exit_code == 0);
  CliResult eval = run_cli("evaluate" + graph_flags(data) + " --checkpoint missing.json",
                           dir);
  CHECK(eval.exit_code != 0);
  CHECK(eval.output.find("--truth") != std::string::npos);
}

TEST_CASE("cli: config file values are used and flags override them") {
  fs::path dir = fresh_dir("config");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 4 --scholars 16 --papers 24 --institutions 3 --topics 2 "
                  "--feature-dim 8 --out " + data.string(), dir).exit_code == 0);
  fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "paths.nodes = " << (data / "nodes.tsv").string() << "\n"
        << "paths.edges = " << (data / "edges.tsv").string() << "\n"
        << "paths.features.author = " << (data / "features_author.tsv").string() << "\n"
        << "paths.features.paper = " << (data / "features_paper.tsv").string() << "\n"
        << "paths.features.institution = " << (data / "features_institution.tsv").string() << "\n"
        << "paths.out_dir = " << (dir / "from_file").string() << "\n"
        << "model.embed_dim = 8\n"
        << "model.num_heads = 2\n"
        << "model.sem_hidden = 8\n"
        << "train.epochs = 2\n"
        << "train.seed = 6\n";
  }
  CliResult a = run_cli("train --config " + cfg.string(), dir);
  REQUIRE(a.exit_code == 0);
  CHECK(fs::exists(dir / "from_file" / "checkpoint.json"));

  CliResult b = run_cli("train --config " + cfg.string() + " --out " + (dir / "flag_wins").string(),
                        dir);
  REQUIRE(b.exit_code == 0);
  CHECK(fs::exists(dir / "flag_wins" / "checkpoint.json"));
}

TEST_CASE("cli: unknown subcommand and bad flags exit nonzero") {
  fs::path dir = fresh_dir("badusage");
  CHECK(run_cli("frobnicate", dir).exit_code != 0);
  CHECK(run_cli("synth --institutions 0 --out " + (dir / "x").string(), dir).exit_code != 0);
}

TEST_CASE("cli: ingest builds features from abstracts") {
  fs::path dir = fresh_dir("ingest");
  {
    std::ofstream nodes(dir / "nodes.tsv");
    nodes << "a1\tauthor\na2\tauthor\np1\tpaper\np2\tpaper\ni1\tinstitution\n";
    std::ofstream edges(dir / "edges.tsv");
    edges << "a1\tp1\twrites\na2\tp2\twrites\na1\ti1\tworks-with\na2\ti1\tworks-with\n";
    std::ofstream abstracts(dir / "abstracts.tsv");
    abstracts << "p1\tgraph representation learning with attention\n"
              << "p2\tcareer mobility in academic networks\n";
  }
  CliResult ing = run_cli("ingest --nodes " + (dir / "nodes.tsv").string() + " --edges " +
                          (dir / "edges.tsv").string() + " --abstracts " +
                          (dir / "abstracts.tsv").string() + " --feature-dim 16 --out " +
                          (dir / "feat").string(), dir);
  REQUIRE(ing.exit_code == 0);
  CHECK(fs::exists(dir / "feat" / "features_author.tsv"));
  CHECK(fs::exists(dir / "feat" / "features_paper.tsv"));
  CHECK(fs::exists(dir / "feat" / "features_institution.tsv"));
}

TEST_CASE("cli: help is available on every subcommand") {
  fs::path dir = fresh_dir("help");
  for (const char* sub : {"synth", "ingest", "train", "recommend", "evaluate", "explain"}) {
    CliResult r = run_cli(std::string(sub) + " --help", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("--help") != std::string::npos);
  }
}
