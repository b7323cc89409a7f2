// lrgk: build, label, train on, and analyze road-network-style graph
// datasets from the command line.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/gnn.hpp"
#include "lrgk/influence.hpp"
#include "lrgk/ingest.hpp"
#include "lrgk/io.hpp"
#include "lrgk/labeling.hpp"
#include "lrgk/netstats.hpp"
#include "lrgk/parallel.hpp"
#include "lrgk/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

lrgk::u64 parse_u64_str(const std::string& s, const std::string& what) {
  lrgk::u64 v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw lrgk::input_error(what + ": not a valid count '" + s + "'");
  return v;
}

// LRGK_SEED takes precedence over any seed from flags or config files.
lrgk::u64 effective_seed(lrgk::u64 fallback) {
  const char* env = std::getenv("LRGK_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  return parse_u64_str(env, "LRGK_SEED");
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const json& config) {
  fs::create_directories(dir);
  json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  j["config"] = config;
  std::ofstream f(dir / "manifest.json");
  if (!f) throw lrgk::input_error("cannot write " + (dir / "manifest.json").string());
  f << j.dump(2) << "\n";
}

std::string read_text_file(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw lrgk::input_error("cannot open: " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw lrgk::input_error("cannot write " + p.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << "\n";
}

std::pair<lrgk::u64, lrgk::u64> parse_dims(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos || x == 0 || x + 1 == s.size())
    throw lrgk::input_error("expected WIDTHxHEIGHT, got '" + s + "'");
  return {parse_u64_str(s.substr(0, x), "grid width"),
          parse_u64_str(s.substr(x + 1), "grid height")};
}

struct GenerateArgs {
  std::string grid, small_world, weight_law = "uniform:50,150";
  double perturb_p = 0.0;
  lrgk::u64 seed = 0;
  std::string out;
};

void cmd_generate(const GenerateArgs& a) {
  if (a.grid.empty() == a.small_world.empty())
    throw lrgk::input_error("generate: pass exactly one of --grid or --small-world");
  const lrgk::u64 seed = effective_seed(a.seed);
  const fs::path out = a.out;

  json cfg;
  cfg["seed"] = seed;
  cfg["out"] = a.out;

  if (!a.grid.empty()) {
    const auto [w, h] = parse_dims(a.grid);
    const auto law = lrgk::WeightLaw::parse(a.weight_law);
    const auto [g, raw] = lrgk::gen_grid_city(w, h, law, a.perturb_p, seed);
    const auto schema = lrgk::build_schema(raw);
    auto ft = lrgk::encode_features(g, raw, schema);
    ft.split = lrgk::make_split(g.n_nodes, {0.1, 0.1, 0.8}, lrgk::seed_mix(seed, 1));
    lrgk::save_bundle(out, g, ft, &schema);
    cfg["grid"] = a.grid;
    cfg["weight_law"] = law.str();
    cfg["perturb_p"] = a.perturb_p;
    std::cout << "generated grid city: " << g.n_nodes << " nodes, " << g.n_edges
              << " edges -> " << out.string() << "\n";
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(a.small_world);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() != 3)
      throw lrgk::input_error("expected --small-world N,K,P, got '" + a.small_world + "'");
    const lrgk::u64 n = parse_u64_str(parts[0], "small-world n");
    const lrgk::u64 k = parse_u64_str(parts[1], "small-world k");
    const double p = std::stod(parts[2]);
    const lrgk::Graph g = lrgk::gen_small_world(n, k, p, seed);
    auto ft = lrgk::basic_features(g);
    ft.split = lrgk::make_split(g.n_nodes, {0.1, 0.1, 0.8}, lrgk::seed_mix(seed, 1));
    lrgk::save_bundle(out, g, ft, nullptr);
    cfg["small_world"] = a.small_world;
    std::cout << "generated small-world graph: " << g.n_nodes << " nodes, "
              << g.n_edges << " edges -> " << out.string() << "\n";
  }
  write_manifest(out, "generate", cfg);
}

struct IngestArgs {
  std::string nodes, edges, out;
  lrgk::u64 seed = 0;
};

void cmd_ingest(const IngestArgs& a) {
  const lrgk::u64 seed = effective_seed(a.seed);
  const auto [g, raw] = lrgk::load_city(a.nodes, a.edges);
  const auto schema = lrgk::build_schema(raw);
  auto ft = lrgk::encode_features(g, raw, schema);
  ft.split = lrgk::make_split(g.n_nodes, {0.1, 0.1, 0.8}, lrgk::seed_mix(seed, 1));
  lrgk::save_bundle(a.out, g, ft, &schema);
  std::cout << lrgk::report_row(lrgk::full_report(g, nullptr)) << "\n";
  json cfg{{"nodes", a.nodes}, {"edges", a.edges}, {"out", a.out}, {"seed", seed}};
  write_manifest(a.out, "ingest", cfg);
}

struct LabelArgs {
  std::string data;
  lrgk::u64 hops = 16;
  int quantiles = 10;
};

void cmd_label(const LabelArgs& a) {
  const auto bundle = lrgk::load_bundle(a.data);
  const auto res = lrgk::label_all(bundle.g, lrgk::u32(a.hops), a.quantiles);
  lrgk::save_labels(fs::path(a.data) / "labels.csv", res);
  std::cout << "labeled " << bundle.g.n_nodes << " nodes into " << a.quantiles
            << " classes (H = " << a.hops << ")\n";
  json cfg{{"data", a.data}, {"hops", a.hops}, {"quantiles", a.quantiles}};
  write_manifest(a.data, "label", cfg);
}

struct StatsArgs {
  std::string data, out;
};

void cmd_stats(const StatsArgs& a) {
  const auto bundle = lrgk::load_bundle(a.data);
  const std::vector<int>* labels = bundle.ft.has_labels() ? &bundle.ft.y : nullptr;
  const auto report = lrgk::full_report(bundle.g, labels);
  const std::string text = lrgk::report_json(report);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text_file(fs::path(a.out) / "stats.json", text);
    json cfg{{"data", a.data}, {"out", a.out}};
    write_manifest(a.out, "stats", cfg);
  }
}

struct SpectralArgs {
  std::string data, out;
  double gamma = 1.0;
  lrgk::u64 depth = 50;
  bool bound_only = false;
  lrgk::u64 dmax = 0, diam = 0;
};

void cmd_spectral(const SpectralArgs& a) {
  if (a.bound_only) {
    if (a.dmax == 0 || a.diam == 0)
      throw lrgk::input_error("spectral --bound-only needs --dmax and --diam");
    std::cout << lrgk::fmt_double(lrgk::bound_lambda(a.dmax, a.diam)) << "\n";
    return;
  }
  if (a.data.empty()) throw lrgk::input_error("spectral: --data is required");
  const auto bundle = lrgk::load_bundle(a.data);
  const auto report =
      lrgk::make_spectral_report(bundle.g, a.gamma, lrgk::u32(a.depth));
  const std::string text = lrgk::report_json(report);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text_file(fs::path(a.out) / "spectral.json", text);
    std::vector<std::vector<std::string>> curve;
    curve.push_back({"l", "residual_norm"});
    for (size_t l = 0; l < report.decay_curve.size(); ++l)
      curve.push_back({std::to_string(l + 1), lrgk::fmt_double(report.decay_curve[l])});
    lrgk::write_csv(fs::path(a.out) / "decay.csv", curve);
    json cfg{{"data", a.data}, {"gamma", a.gamma}, {"depth", a.depth}, {"out", a.out}};
    write_manifest(a.out, "spectral", cfg);
  }
}

struct TrainArgs {
  std::string data, config, out;
};

json run_config_json(const lrgk::TrainConfig& cfg) {
  return json::parse(lrgk::train_config_to_json(cfg));
}

void cmd_train(const TrainArgs& a) {
  const auto bundle = lrgk::load_bundle(a.data);
  auto cfg = lrgk::train_config_from_json(read_text_file(a.config));
  cfg.seed = effective_seed(cfg.seed);
  const auto res = lrgk::train(bundle.g, bundle.ft, cfg);
  fs::create_directories(a.out);
  lrgk::save_params(res.params, (fs::path(a.out) / "checkpoint.bin").string());
  lrgk::save_history(res.history, (fs::path(a.out) / "history.csv").string());
  const double test_acc =
      lrgk::evaluate(res.params, bundle.g, bundle.ft, lrgk::kTest, cfg.H,
                     cfg.cap_per_hop, lrgk::seed_mix(cfg.seed, 0x7E57), cfg.gamma);
  json summary{{"best_val_acc", res.best_val_acc},
               {"best_epoch", res.best_epoch},
               {"test_acc", test_acc}};
  std::cout << summary.dump(2) << "\n";
  write_text_file(fs::path(a.out) / "summary.json", summary.dump(2));
  json cfg_j{{"data", a.data}, {"out", a.out}, {"train", run_config_json(cfg)}};
  write_manifest(a.out, "train", cfg_j);
}

struct ExperimentArgs {
  std::string data, config, out, pairs;
};

void cmd_experiment(const ExperimentArgs& a) {
  const auto bundle = lrgk::load_bundle(a.data);
  const auto base = lrgk::train_config_from_json(read_text_file(a.config));
  if (a.pairs.empty()) throw lrgk::input_error("experiment: --pairs is required");

  std::vector<std::pair<lrgk::u64, lrgk::u64>> pairs;
  std::stringstream ss(a.pairs);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto [l, h] = parse_dims(item);
    pairs.emplace_back(l, h);
  }

  std::vector<std::vector<std::string>> table;
  table.push_back({"architecture", "L", "H", "best_val_acc", "test_acc"});
  for (const auto& [l, h] : pairs) {
    lrgk::TrainConfig cfg = base;
    cfg.L = l;
    cfg.H = lrgk::u32(h);
    cfg.seed = effective_seed(cfg.seed);
    // Seeds with H < L leak context through a full-graph batch; bind them
    // to their own ego batches instead.
    if (cfg.arch != lrgk::Arch::MLP && lrgk::u64(cfg.H) < cfg.L && cfg.batch_size == 0)
      cfg.batch_size = 1;
    const auto res = lrgk::train(bundle.g, bundle.ft, cfg);
    const double test_acc =
        lrgk::evaluate(res.params, bundle.g, bundle.ft, lrgk::kTest, cfg.H,
                       cfg.cap_per_hop, lrgk::seed_mix(cfg.seed, 0x7E57), cfg.gamma);
    table.push_back({lrgk::arch_name(cfg.arch), std::to_string(l), std::to_string(h),
                     lrgk::fmt_double(res.best_val_acc), lrgk::fmt_double(test_acc)});
    std::cout << lrgk::arch_name(cfg.arch) << " L=" << l << " H=" << h
              << " best_val=" << res.best_val_acc << " test=" << test_acc << "\n";
  }
  fs::create_directories(a.out);
  lrgk::write_csv(fs::path(a.out) / "experiment.csv", table);
  json cfg_j{{"data", a.data},
             {"pairs", a.pairs},
             {"out", a.out},
             {"base", run_config_json(base)}};
  write_manifest(a.out, "experiment", cfg_j);
}

struct InfluenceArgs {
  std::string data, checkpoint, out;
  lrgk::u64 hops = 8;
  lrgk::u64 samples = 2000;
  lrgk::u64 seed = 0;
  double gamma = 1.0;
};

void cmd_influence(const InfluenceArgs& a) {
  const auto bundle = lrgk::load_bundle(a.data);
  const auto params = lrgk::load_params(a.checkpoint);
  const lrgk::u64 seed = effective_seed(a.seed);
  const auto prof = lrgk::receptive_field(params, bundle.g, bundle.ft.X,
                                          lrgk::u32(a.hops), a.samples, seed, a.gamma);
  const std::string text = lrgk::influence_json(prof);
  std::cout << text << "\n";
  fs::create_directories(a.out);
  lrgk::save_influence_csv(prof, (fs::path(a.out) / "influence.csv").string());
  write_text_file(fs::path(a.out) / "influence.json", text);
  json cfg{{"data", a.data},     {"checkpoint", a.checkpoint}, {"hops", a.hops},
           {"samples", a.samples}, {"seed", seed},             {"gamma", a.gamma},
           {"out", a.out}};
  write_manifest(a.out, "influence", cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"road-network graph toolkit: datasets, training, and analysis"};
  app.require_subcommand(1);
  app.fallthrough();  // lets global options appear after the subcommand name

  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads,
                 "worker threads for parallel stages (1 = bit-exact)");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "synthesize a dataset bundle");
  c_gen->add_option("--grid", gen.grid, "grid city WIDTHxHEIGHT");
  c_gen->add_option("--small-world", gen.small_world, "ring lattice N,K,P");
  c_gen->add_option("--weight-law", gen.weight_law,
                    "edge length law: uniform:LO,HI | constant:C | lognormal:MU,SIGMA");
  c_gen->add_option("--perturb-p", gen.perturb_p, "edge removal probability");
  c_gen->add_option("--seed", gen.seed, "master seed");
  c_gen->add_option("--out", gen.out, "output bundle directory")->required();

  IngestArgs ing;
  auto* c_ing = app.add_subcommand("ingest", "build a bundle from node/edge CSVs");
  c_ing->add_option("--nodes", ing.nodes, "nodes csv")->required();
  c_ing->add_option("--edges", ing.edges, "edges csv")->required();
  c_ing->add_option("--seed", ing.seed, "split seed");
  c_ing->add_option("--out", ing.out, "output bundle directory")->required();

  LabelArgs lab;
  auto* c_lab = app.add_subcommand("label", "eccentricity quantile labels");
  c_lab->add_option("--data", lab.data, "bundle directory")->required();
  c_lab->add_option("--hops", lab.hops, "ball radius H");
  c_lab->add_option("--quantiles", lab.quantiles, "class count");

  StatsArgs sta;
  auto* c_sta = app.add_subcommand("stats", "network statistics report");
  c_sta->add_option("--data", sta.data, "bundle directory")->required();
  c_sta->add_option("--out", sta.out, "report directory");

  SpectralArgs spe;
  auto* c_spe = app.add_subcommand("spectral", "spectral diagnostics");
  c_spe->add_option("--data", spe.data, "bundle directory");
  c_spe->add_option("--out", spe.out, "report directory");
  c_spe->add_option("--gamma", spe.gamma, "self-loop strength");
  c_spe->add_option("--depth", spe.depth, "decay curve depth");
  c_spe->add_flag("--bound-only", spe.bound_only, "print the eigenvalue bound only");
  c_spe->add_option("--dmax", spe.dmax, "max degree (bound-only)");
  c_spe->add_option("--diam", spe.diam, "diameter (bound-only)");

  TrainArgs tra;
  auto* c_tra = app.add_subcommand("train", "train a model on a labeled bundle");
  c_tra->add_option("--data", tra.data, "bundle directory")->required();
  c_tra->add_option("--config", tra.config, "train config json")->required();
  c_tra->add_option("--out", tra.out, "run directory")->required();

  ExperimentArgs exp;
  auto* c_exp = app.add_subcommand("experiment", "accuracy table over (L,H) pairs");
  c_exp->add_option("--data", exp.data, "bundle directory")->required();
  c_exp->add_option("--config", exp.config, "base train config json")->required();
  c_exp->add_option("--pairs", exp.pairs, "comma list of LxH, e.g. 2x2,16x16")->required();
  c_exp->add_option("--out", exp.out, "run directory")->required();

  InfluenceArgs inf;
  auto* c_inf = app.add_subcommand("influence", "receptive-field influence profile");
  c_inf->add_option("--data", inf.data, "bundle directory")->required();
  c_inf->add_option("--checkpoint", inf.checkpoint, "model checkpoint")->required();
  c_inf->add_option("--hops", inf.hops, "max hop H");
  c_inf->add_option("--samples", inf.samples, "sampled node count");
  c_inf->add_option("--seed", inf.seed, "sampling seed");
  c_inf->add_option("--gamma", inf.gamma, "self-loop strength");
  c_inf->add_option("--out", inf.out, "report directory")->required();

  c_gen->callback([&] { lrgk::set_default_threads(threads); cmd_generate(gen); });
  c_ing->callback([&] { lrgk::set_default_threads(threads); cmd_ingest(ing); });
  c_lab->callback([&] { lrgk::set_default_threads(threads); cmd_label(lab); });
  c_sta->callback([&] { lrgk::set_default_threads(threads); cmd_stats(sta); });
  c_spe->callback([&] { lrgk::set_default_threads(threads); cmd_spectral(spe); });
  c_tra->callback([&] { lrgk::set_default_threads(threads); cmd_train(tra); });
  c_exp->callback([&] { lrgk::set_default_threads(threads); cmd_experiment(exp); });
  c_inf->callback([&] { lrgk::set_default_threads(threads); cmd_influence(inf); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lrgk::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
