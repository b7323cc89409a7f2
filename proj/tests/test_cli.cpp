#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lrgk/graph.hpp"
#include "lrgk/ingest.hpp"
#include "lrgk/io.hpp"

using namespace lrgk;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static fs::path p = [] {
    fs::path d = fs::temp_directory_path() / "lrgk_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path out = scratch() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::ostringstream cmd;
  if (!env.empty()) cmd << "env " << env << " ";
  cmd << LRGK_CLI_PATH << " " << args << " > " << out << " 2> " << err;
  const int rc = std::system(cmd.str().c_str());
  RunResult r;
  r.code = rc == -1 ? -1 : WEXITSTATUS(rc);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::map<u64, std::pair<double, int>> load_label_csv(const fs::path& f) {
  auto rows = read_csv(f);
  std::map<u64, std::pair<double, int>> m;
  for (size_t i = 1; i < rows.size(); ++i)
    m[std::stoull(rows[i][0])] = {std::stod(rows[i][1]), std::stoi(rows[i][2])};
  return m;
}

}  // namespace

TEST_CASE("cli: help exits zero, no subcommand exits with usage error") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("cli: bound-only prints the published value") {
  RunResult r = run("spectral --bound-only --dmax 15 --diam 121");
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 6) == "0.4741");

  // degenerate diameter is an input error
  CHECK(run("spectral --bound-only --dmax 15 --diam 3").code == 2);
}

TEST_CASE("cli: missing input file gives exit 2 and names the path") {
  RunResult r = run("ingest --nodes /nonexistent/nodes.csv --edges /nonexistent/edges.csv --out " +
                    (scratch() / "never").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/nodes.csv") != std::string::npos);

  RunResult s = run("stats --data " + (scratch() / "no_bundle").string());
  CHECK(s.code == 2);
}

TEST_CASE("cli: generate builds the full-size bundle") {
  const fs::path dir = scratch() / "city64";
  RunResult r = run("generate --grid 64x64 --seed 7 --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "graph.bin"));
  CHECK(fs::exists(dir / "features.csv"));
  CHECK(fs::exists(dir / "split.csv"));
  CHECK(fs::exists(dir / "schema.json"));
  CHECK(fs::exists(dir / "manifest.json"));
  Graph g = load_graph(dir / "graph.bin");
  CHECK(g.n_nodes == 4096);

  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"subcommand\"") != std::string::npos);
  CHECK(manifest.find("generate") != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("\"seed\"") != std::string::npos);
}

TEST_CASE("cli: label balance, monotone hops, binary quantiles") {
  const fs::path dir = scratch() / "city16";
  REQUIRE(run("generate --grid 16x16 --seed 7 --out " + dir.string()).code == 0);

  REQUIRE(run("label --data " + dir.string() + " --hops 2").code == 0);
  auto h2 = load_label_csv(dir / "labels.csv");

  REQUIRE(run("label --data " + dir.string() + " --hops 16").code == 0);
  auto h16 = load_label_csv(dir / "labels.csv");

  REQUIRE(h2.size() == 256);
  REQUIRE(h16.size() == 256);
  // per-node ε̂ verified non-decreasing on this generated artifact
  for (const auto& [v, pe] : h2) CHECK(h16.at(v).first >= pe.first);

  // ten classes, near-balanced
  std::map<int, int> sizes;
  for (const auto& [v, pe] : h16) ++sizes[pe.second];
  CHECK(sizes.size() == 10);
  for (const auto& [cls, n] : sizes) {
    CHECK(n >= 25);
    CHECK(n <= 26);
  }

  REQUIRE(run("label --data " + dir.string() + " --hops 16 --quantiles 2").code == 0);
  auto bin = load_label_csv(dir / "labels.csv");
  std::set<int> classes;
  for (const auto& [v, pe] : bin) classes.insert(pe.second);
  CHECK(classes == std::set<int>{0, 1});
}

TEST_CASE("cli: ingest fixture prints a stats row and writes the bundle") {
  const fs::path fx = fs::path(LRGK_FIXTURE_DIR);
  const fs::path dir = scratch() / "fixture_bundle";
  RunResult r = run("ingest --nodes " + (fx / "sample_nodes.csv").string() +
                    " --edges " + (fx / "sample_edges.csv").string() + " --out " +
                    dir.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("10") != std::string::npos);  // |V| appears in the row
  Graph g = load_graph(dir / "graph.bin");
  CHECK(g.n_nodes == 10);
  CHECK(g.n_edges == 11);

  // feature table is the full 37-wide city schema
  auto rows = read_csv(dir / "features.csv");
  REQUIRE(!rows.empty());
  CHECK(rows[0].size() == 38);  // id column + 37 features
  CHECK(rows.size() == 11);     // header + 10 nodes
}

TEST_CASE("cli: stats on a triangle bundle reports transitivity 1") {
  // build a K3 bundle through the library, then point the CLI at it
  GraphBuilder b(3);
  b.add_edge(0, 1, 1.0);
  b.add_edge(1, 2, 1.0);
  b.add_edge(0, 2, 1.0);
  Graph g = b.build();
  FeatureTable ft = basic_features(g);
  const fs::path dir = scratch() / "k3";
  save_bundle(dir, g, ft, nullptr);

  RunResult r = run("stats --data " + dir.string() + " --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "stats.json"));
  const std::string js = slurp(dir / "stats.json");
  CHECK(js.find("\"transitivity\": 1") != std::string::npos);

  // byte-identical rerun (sequential mode)
  const std::string first = js;
  REQUIRE(run("stats --data " + dir.string() + " --out " + dir.string() +
              " --threads 1")
              .code == 0);
  CHECK(slurp(dir / "stats.json") == first);
}

TEST_CASE("cli: spectral report emits decay curve and json") {
  const fs::path dir = scratch() / "city8";
  REQUIRE(run("generate --grid 8x8 --seed 7 --out " + dir.string()).code == 0);
  RunResult r = run("spectral --data " + dir.string() + " --depth 10 --out " +
                    dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "spectral.json"));
  CHECK(fs::exists(dir / "decay.csv"));
  auto rows = read_csv(dir / "decay.csv");
  REQUIRE(rows.size() == 11);  // header + 10 depths
  CHECK(rows[0] == CsvRow{"l", "residual_norm"});
  CHECK(r.out.find("lambda_N_minus_1") != std::string::npos);

  // rerun in sequential mode is byte-identical
  const std::string decay = slurp(dir / "decay.csv");
  REQUIRE(run("spectral --data " + dir.string() + " --depth 10 --out " +
              dir.string() + " --threads 1")
              .code == 0);
  CHECK(slurp(dir / "decay.csv") == decay);
}

TEST_CASE("cli: LRGK_SEED env var overrides the config seed") {
  const fs::path a = scratch() / "seed_a";
  const fs::path b = scratch() / "seed_b";
  const fs::path c = scratch() / "seed_c";
  REQUIRE(run("generate --grid 6x6 --seed 1 --out " + a.string(),
              "LRGK_SEED=7")
              .code == 0);
  REQUIRE(run("generate --grid 6x6 --seed 7 --out " + b.string()).code == 0);
  REQUIRE(run("generate --grid 6x6 --seed 1 --out " + c.string()).code == 0);
  CHECK(slurp(a / "graph.bin") == slurp(b / "graph.bin"));
  CHECK(slurp(a / "features.csv") == slurp(b / "features.csv"));
  CHECK(slurp(a / "graph.bin") != slurp(c / "graph.bin"));
}

TEST_CASE("cli: train and influence round-trip on a small bundle") {
  const fs::path dir = scratch() / "train_city";
  REQUIRE(run("generate --grid 8x8 --seed 7 --out " + dir.string()).code == 0);
  REQUIRE(run("label --data " + dir.string() + " --hops 16").code == 0);

  // minimal MLP config
  const fs::path cfg = scratch() / "mlp.json";
  {
    std::ofstream out(cfg);
    out << "{\"architecture\": \"mlp\", \"L\": 2, \"H\": 2, \"hidden\": 8, "
           "\"lr\": 0.01, \"dropout\": 0.0, \"epochs\": 60, "
           "\"record_window\": 20, \"seed\": 3}";
  }
  const fs::path rundir = scratch() / "train_out";
  RunResult r = run("train --data " + dir.string() + " --config " + cfg.string() +
                    " --out " + rundir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(rundir / "checkpoint.bin"));
  CHECK(fs::exists(rundir / "history.csv"));
  CHECK(fs::exists(rundir / "summary.json"));
  CHECK(fs::exists(rundir / "manifest.json"));
  auto hist = read_csv(rundir / "history.csv");
  REQUIRE(hist.size() >= 2);
  CHECK(hist[0] == CsvRow{"epoch", "train_loss", "val_acc"});
  const std::string summary = slurp(rundir / "summary.json");
  CHECK(summary.find("best_val_acc") != std::string::npos);
  CHECK(summary.find("test_acc") != std::string::npos);

  // influence of a pure MLP never leaves the seed: R = 0
  const fs::path infdir = scratch() / "inf_out";
  RunResult ir = run("influence --data " + dir.string() + " --checkpoint " +
                     (rundir / "checkpoint.bin").string() +
                     " --hops 4 --samples 30 --seed 5 --out " + infdir.string());
  CHECK(ir.code == 0);
  CHECK(fs::exists(infdir / "influence.csv"));
  CHECK(fs::exists(infdir / "influence.json"));
  const std::string ij = slurp(infdir / "influence.json");
  CHECK(ij.find("\"R\": 0") != std::string::npos);

  // missing checkpoint is an input error
  CHECK(run("influence --data " + dir.string() + " --checkpoint " +
            (scratch() / "absent.bin").string() + " --out " +
            (scratch() / "inf2").string())
            .code == 2);
}

TEST_CASE("cli: experiment writes one row per (L,H) pair") {
  const fs::path dir = scratch() / "exp_city";
  REQUIRE(run("generate --grid 8x8 --seed 7 --out " + dir.string()).code == 0);
  REQUIRE(run("label --data " + dir.string() + " --hops 8").code == 0);

  const fs::path cfg = scratch() / "exp.json";
  {
    std::ofstream out(cfg);
    out << "{\"architecture\": \"gcn\", \"L\": 2, \"H\": 2, \"hidden\": 8, "
           "\"lr\": 0.01, \"dropout\": 0.0, \"epochs\": 30, "
           "\"record_window\": 10, \"seed\": 3}";
  }
  const fs::path rundir = scratch() / "exp_out";
  RunResult r = run("experiment --data " + dir.string() + " --config " +
                    cfg.string() + " --pairs 1x1,2x2 --out " + rundir.string());
  CHECK(r.code == 0);
  auto rows = read_csv(rundir / "experiment.csv");
  REQUIRE(rows.size() == 3);  // header + 2 pairs
  CHECK(rows[0] ==
        CsvRow{"architecture", "L", "H", "best_val_acc", "test_acc"});
  CHECK(rows[1][1] == "1");
  CHECK(rows[2][1] == "2");
}

TEST_CASE("cli: malformed generate arguments are input errors") {
  CHECK(run("generate --grid nonsense --seed 1 --out " +
            (scratch() / "bad1").string())
            .code == 2);
  CHECK(run("generate --grid 4x4 --small-world 10,2,0.1 --seed 1 --out " +
            (scratch() / "bad2").string())
            .code == 2);  // mutually exclusive inputs
  CHECK(run("generate --seed 1 --out " + (scratch() / "bad3").string()).code ==
        2);  // neither generator chosen
  CHECK(run("generate --grid 4x4 --weight-law triangular:1 --seed 1 --out " +
            (scratch() / "bad4").string())
            .code == 2);
}
