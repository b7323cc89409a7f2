#include "lrgk/influence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <nlohmann/json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/io.hpp"
#include "lrgk/parallel.hpp"

namespace lrgk {

PairInfluence influence_pair(const ModelParams& p, const Graph& g, const Mat& X,
                             u64 v, u32 H, double gamma) {
  if (v >= g.n_nodes) throw input_error("influence_pair: node out of range");
  Rng rng(0);  // exhaustive ball; no randomness is consumed
  PairInfluence out;
  out.batch = sample_ego(g, X, {v}, H, 0, rng);
  const EgoBatch& eb = out.batch;

  std::optional<NormalizedOperator> op;
  const NormalizedOperator* opp = nullptr;
  if (p.arch != Arch::MLP) {
    op.emplace(make_operator(eb.sub, OperatorKind::SAug, gamma));
    opp = &*op;
  }
  ForwardPass fp = forward(p, opp, eb.X, false, nullptr);
  const u64 seed_row = fp.tape.gather_rows(fp.logits_id, {eb.seeds_local[0]});
  const i64 n_classes = fp.tape.val(seed_row).cols();

  out.I = Vec::Zero(i64(eb.nodes.size()));
  for (i64 i = 0; i < n_classes; ++i) {
    Mat seed = Mat::Zero(1, n_classes);
    seed(0, i) = 1.0;
    fp.tape.backward(seed_row, seed, /*retain=*/true);
    out.I += fp.tape.grad(fp.x_id).cwiseAbs().rowwise().sum();
  }
  return out;
}

Vec total_influence(const ModelParams& p, const Graph& g, const Mat& X, u64 v,
                    u32 H, double gamma) {
  const PairInfluence pi = influence_pair(p, g, X, v, H, gamma);
  Vec T = Vec::Zero(i64(H) + 1);
  for (size_t k = 0; k < pi.batch.nodes.size(); ++k)
    T[i64(pi.batch.hop[k])] += pi.I[i64(k)];
  return T;
}

InfluenceProfile receptive_field(const ModelParams& p, const Graph& g,
                                 const Mat& X, u32 H_max, u64 n_samples,
                                 u64 seed, double gamma) {
  if (n_samples < 1) throw input_error("receptive_field: n_samples must be >= 1");
  if (g.n_nodes == 0) throw input_error("receptive_field: empty graph");

  std::vector<u64> sample;
  if (n_samples >= g.n_nodes) {
    sample.resize(g.n_nodes);
    std::iota(sample.begin(), sample.end(), u64(0));
  } else {
    Rng rng(seed);
    sample = rng.sample_without_replacement(g.n_nodes, n_samples);
  }

  InfluenceProfile prof;
  prof.H_max = H_max;
  prof.seed = seed;
  prof.n_sampled = sample.size();

  Mat t_all = Mat(i64(sample.size()), i64(H_max) + 1);
  parallel_for(sample.size(), [&](size_t lo, size_t hi) {
    for (size_t k = lo; k < hi; ++k)
      t_all.row(i64(k)) =
          total_influence(p, g, X, sample[k], H_max, gamma).transpose();
  });

  // Sequential reductions keep results schedule-independent.
  prof.T_bar = Vec::Zero(i64(H_max) + 1);
  for (i64 k = 0; k < t_all.rows(); ++k) prof.T_bar += t_all.row(k).transpose();
  prof.T_bar /= double(prof.n_sampled);

  double acc = 0.0;
  u64 used = 0;
  for (i64 k = 0; k < t_all.rows(); ++k) {
    const double tot = t_all.row(k).sum();
    if (tot > 0.0) {
      double num = 0.0;
      for (i64 h = 0; h <= i64(H_max); ++h) num += double(h) * t_all(k, h);
      acc += num / tot;
      ++used;
    } else {
      ++prof.n_excluded;
    }
  }
  prof.R = used > 0 ? acc / double(used) : 0.0;

  prof.T_bar_normalized = Vec::Zero(i64(H_max) + 1);
  if (prof.T_bar[0] > 0.0) prof.T_bar_normalized = prof.T_bar / prof.T_bar[0];
  return prof;
}

std::vector<DilutionRow> dilution_experiment(u64 dims, u64 width, u32 h_max) {
  if (dims != 2) throw input_error("dilution_experiment: only 2-D lattices are supported");
  if (width < 3) throw input_error("dilution_experiment: width must be >= 3");
  if (h_max < 1) throw input_error("dilution_experiment: h_max must be >= 1");

  GraphBuilder b(width * width);
  for (u64 r = 0; r < width; ++r)
    for (u64 c = 0; c < width; ++c) {
      const u64 v = r * width + c;
      if (c + 1 < width) b.add_edge(v, v + 1, 1.0);
      if (r + 1 < width) b.add_edge(v, v + width, 1.0);
    }
  const Graph g = b.build();
  const u64 center = (width / 2) * width + width / 2;

  const std::vector<u32> hops = bfs_hops(g, center, h_max);
  std::vector<u64> shell(size_t(h_max) + 1, 0);
  for (u32 h : hops)
    if (h != kNoHop) ++shell[h];

  std::vector<DilutionRow> rows;
  u64 ball = shell[0];
  for (u32 h = 1; h <= h_max; ++h) {
    ball += shell[h];
    if (shell[h] != 4ull * h)
      throw input_error("dilution_experiment: shell " + std::to_string(h) +
                        " is truncated by the lattice boundary; increase width");
    const u64 want_ball = 2ull * h * h + 2ull * h + 1;
    if (ball != want_ball)
      throw input_error("dilution_experiment: ball size mismatch at h = " +
                        std::to_string(h));
    DilutionRow row;
    row.h = h;
    row.shell_size = shell[h];
    row.ball_size = ball;
    row.I_sum = 1.0;  // single distinguished unit on the shell
    row.I_mean = row.I_sum / double(row.shell_size);
    // Product before division keeps the constant 1/4 exact in fp64.
    row.I_mean_h = (row.I_sum * double(h)) / double(row.shell_size);
    row.ball_mean = row.I_sum / double(row.ball_size);
    row.T_bar = row.I_sum;
    rows.push_back(row);
  }
  return rows;
}

CancellationResult cancellation_demo(const std::function<double(double)>& f,
                                     double x, double step) {
  if (!(step > 0.0)) throw input_error("cancellation_demo: step must be positive");
  const double d_pos = (f(x + step) - f(x - step)) / (2.0 * step);
  // Negation is exact in IEEE-754, so this branch is bitwise -d_pos.
  const double d_neg = ((-f(x + step)) - (-f(x - step))) / (2.0 * step);
  CancellationResult r;
  r.net = d_pos + d_neg;
  r.abs_sum = std::abs(d_pos) + std::abs(d_neg);
  return r;
}

void save_influence_csv(const InfluenceProfile& prof, const std::string& path) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"h", "T_bar", "T_bar_normalized"});
  for (i64 h = 0; h < prof.T_bar.size(); ++h)
    table.push_back({std::to_string(h), fmt_double(prof.T_bar[h]),
                     fmt_double(prof.T_bar_normalized[h])});
  write_csv(path, table);
}

std::string influence_json(const InfluenceProfile& prof) {
  nlohmann::json j;
  j["R"] = prof.R;
  j["n_sampled"] = prof.n_sampled;
  j["excluded"] = prof.n_excluded;
  j["seed"] = prof.seed;
  return j.dump(2);
}

}  // namespace lrgk
