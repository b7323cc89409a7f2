#pragma once
// Jacobian-based influence scores, per-shell totals, the influence-weighted
// receptive field statistic, and the dilution / cancellation experiments.

#include <functional>
#include <string>
#include <vector>

#include "lrgk/gnn.hpp"
#include "lrgk/graph.hpp"
#include "lrgk/types.hpp"

namespace lrgk {

// I(v, u) for every u in v's H-hop ball: one retained backward sweep per
// output class; absolute input-feature gradients summed over classes and
// feature columns. Nodes outside the ball have influence 0 by locality.
struct PairInfluence {
  EgoBatch batch;
  Vec I;  // indexed by local node of batch
};
PairInfluence influence_pair(const ModelParams& p, const Graph& g, const Mat& X,
                             u64 v, u32 H, double gamma = 1.0);

// T_h(v) for h = 0..H: sums of I(v, ·) over unweighted hop shells.
Vec total_influence(const ModelParams& p, const Graph& g, const Mat& X, u64 v,
                    u32 H, double gamma = 1.0);

struct InfluenceProfile {
  u32 H_max = 0;
  Vec T_bar;             // mean T_h over sampled nodes, h = 0..H_max
  Vec T_bar_normalized;  // T_bar / T_bar[0] (zeros when T_bar[0] == 0)
  double R = 0.0;        // mean over nodes of sum(h*T_h)/sum(T_h)
  u64 n_sampled = 0;
  u64 n_excluded = 0;  // zero-total nodes skipped by R's average
  u64 seed = 0;
};
InfluenceProfile receptive_field(const ModelParams& p, const Graph& g,
                                 const Mat& X, u32 H_max, u64 n_samples,
                                 u64 seed, double gamma = 1.0);

struct DilutionRow {
  u32 h = 0;
  u64 shell_size = 0;     // 4h on interior lattice shells
  u64 ball_size = 0;      // 2h^2 + 2h + 1
  double I_sum = 0.0;     // one unit of influence carried on the shell
  double I_mean = 0.0;    // I_sum / shell_size
  double I_mean_h = 0.0;  // (I_sum * h) / shell_size, constant 1/4
  double ball_mean = 0.0; // I_sum / ball_size
  double T_bar = 0.0;     // shell total; equals I_sum whatever the size
};
// Hand-specified influence field on a width x width 2-D lattice: each shell
// around the center carries a single distinguished unit of influence. Shells
// truncated by the boundary raise an input error. dims must be 2.
std::vector<DilutionRow> dilution_experiment(u64 dims, u64 width, u32 h_max);

struct CancellationResult {
  double net = 0.0;      // derivative estimate of k = f + (-f)
  double abs_sum = 0.0;  // |f'| + |(-f)'|
};
// Central-difference derivative of the mirrored pair at x: the signed parts
// cancel to exactly zero while the absolute parts add up.
CancellationResult cancellation_demo(const std::function<double(double)>& f,
                                     double x, double step = 1e-5);

void save_influence_csv(const InfluenceProfile& prof, const std::string& path);
std::string influence_json(const InfluenceProfile& prof);

}  // namespace lrgk
