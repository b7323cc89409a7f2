#pragma once
// Message-passing models (MLP / SGC / GCN) over a hand-written reverse-mode
// tape, H-hop ego-batch sampling, and AdamW training with best-val
// checkpointing.

#include <functional>
#include <string>
#include <vector>

#include "lrgk/graph.hpp"
#include "lrgk/ingest.hpp"
#include "lrgk/rng.hpp"
#include "lrgk/spectral.hpp"
#include "lrgk/types.hpp"

namespace lrgk {

enum class Arch : u8 { MLP = 0, SGC = 1, GCN = 2 };

std::string arch_name(Arch a);
Arch parse_arch(const std::string& s);

// Reverse-mode tape over dense matrices. Nodes are appended in topological
// order by construction, so backward() walks them in reverse creation order.
// A tape is single-shot unless backward() is called with retain = true.
class Tape {
 public:
  u64 input(Mat v);
  u64 matmul(u64 a, u64 b);
  // y = op * x, applied column-wise; op must outlive the tape.
  u64 spmm(const NormalizedOperator& op, u64 x);
  // bias is a 1 x k node broadcast over rows.
  u64 add_bias(u64 x, u64 bias);
  u64 relu(u64 x);
  // Inverted dropout: kept entries are scaled by 1/(1-p). Training only.
  u64 dropout(u64 x, double p, Rng& rng);
  u64 gather_rows(u64 x, std::vector<u64> rows);
  // Mean softmax cross-entropy over rows; produces a 1x1 node.
  u64 softmax_xent(u64 logits, std::vector<int> labels);

  const Mat& val(u64 id) const;
  const Mat& grad(u64 id) const;
  u64 size() const { return nodes_.size(); }

  // Seeds d(output)/d(node id) and accumulates into every grad. With
  // retain = true the tape stays usable for further sweeps.
  void backward(u64 id, const Mat& seed, bool retain = false);

 private:
  struct Node {
    Mat val;
    Mat grad;
    std::function<void(Tape&, u64)> back;  // (tape, own id)
  };
  u64 push(Mat v, std::function<void(Tape&, u64)> back);
  Mat& grad_mut(u64 id);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

struct ModelParams {
  Arch arch = Arch::GCN;
  u64 L = 2;  // depth: layer count for MLP/GCN, propagation steps for SGC
  u64 in_dim = 0;
  u64 hidden = 32;
  u64 out_dim = 0;
  double dropout_p = 0.0;
  std::vector<Mat> W;  // SGC holds one collapsed weight, others hold L
  std::vector<Mat> b;  // 1 x cols each, parallel to W
};

ModelParams init_params(Arch arch, u64 L, u64 in_dim, u64 hidden, u64 out_dim,
                        double dropout_p, u64 seed);
void save_params(const ModelParams& p, const std::string& path);
ModelParams load_params(const std::string& path);

// Union of per-seed H-hop balls, as an induced subgraph with carried
// feature rows. hop[i] is the hop distance from local node i to the
// nearest seed.
struct EgoBatch {
  Graph sub;
  std::vector<u64> nodes;  // local -> global, ascending
  std::vector<u64> seeds_global;
  std::vector<u64> seeds_local;
  std::vector<u32> hop;
  Mat X;
};

// cap_per_hop = 0 means no cap; otherwise each seed keeps at most that many
// newly discovered nodes per hop, chosen uniformly.
EgoBatch sample_ego(const Graph& g, const Mat& X_full,
                    const std::vector<u64>& seeds, u32 H, u64 cap_per_hop,
                    Rng& rng);

struct ForwardPass {
  Tape tape;
  u64 x_id = 0;       // input feature node
  u64 logits_id = 0;  // per-row logits for every node fed in
  std::vector<u64> w_ids;
  std::vector<u64> b_ids;
};

// op may be null for MLP and is required for SGC/GCN. drop_rng is only
// consumed when training and dropout_p > 0.
ForwardPass forward(const ModelParams& p, const NormalizedOperator* op,
                    const Mat& X, bool training, Rng* drop_rng);

// Full-graph inference logits for the given seed rows (no dropout).
Mat eval_logits(const ModelParams& p, const Graph& g, const Mat& X,
                const std::vector<u64>& seeds, double gamma = 1.0);

struct TrainConfig {
  Arch arch = Arch::GCN;
  u64 L = 2;
  u32 H = 2;
  u64 hidden = 32;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  double dropout = 0.2;
  u64 epochs = 20000;
  u64 record_window = 100;
  u64 seed = 0;
  u64 batch_size = 0;   // 0 = one full-graph batch (needs H >= L)
  u64 cap_per_hop = 0;  // 0 = no cap
  double gamma = 1.0;   // self-loop strength of the propagation operator
};

TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& cfg);

struct HistoryRow {
  u64 epoch = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainResult {
  ModelParams params;  // best validation checkpoint
  std::vector<HistoryRow> history;
  double best_val_acc = 0.0;
  u64 best_epoch = 0;
};

TrainResult train(const Graph& g, const FeatureTable& ft,
                  const TrainConfig& cfg);

// Accuracy over the rows whose split equals split_kind. Seeds with H < L
// are evaluated through their own H-hop ego batches.
double evaluate(const ModelParams& p, const Graph& g, const FeatureTable& ft,
                u8 split_kind, u32 H, u64 cap_per_hop, u64 seed,
                double gamma = 1.0);

void save_history(const std::vector<HistoryRow>& rows,
                  const std::string& path);

}  // namespace lrgk
