#include "lrgk/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/io.hpp"
#include "lrgk/parallel.hpp"

namespace lrgk {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

u64 argmax_row(const Mat& m, u64 r) {
  u64 best = 0;
  for (i64 j = 1; j < m.cols(); ++j)
    if (m(i64(r), j) > m(i64(r), i64(best))) best = u64(j);
  return best;
}

}  // namespace

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::MLP: return "MLP";
    case Arch::SGC: return "SGC";
    case Arch::GCN: return "GCN";
  }
  throw input_error("arch_name: unknown architecture");
}

Arch parse_arch(const std::string& s) {
  if (s == "MLP" || s == "mlp") return Arch::MLP;
  if (s == "SGC" || s == "sgc") return Arch::SGC;
  if (s == "GCN" || s == "gcn") return Arch::GCN;
  throw input_error("unknown architecture '" + s + "' (expected MLP, SGC, or GCN)");
}

// ---------------------------------------------------------------------------
// Tape

u64 Tape::push(Mat v, std::function<void(Tape&, u64)> back) {
  nodes_.push_back(Node{std::move(v), Mat(), std::move(back)});
  return nodes_.size() - 1;
}

const Mat& Tape::val(u64 id) const {
  if (id >= nodes_.size()) throw input_error("tape: node id out of range");
  return nodes_[id].val;
}

const Mat& Tape::grad(u64 id) const {
  if (id >= nodes_.size()) throw input_error("tape: node id out of range");
  return nodes_[id].grad;
}

Mat& Tape::grad_mut(u64 id) {
  if (id >= nodes_.size()) throw input_error("tape: node id out of range");
  return nodes_[id].grad;
}

u64 Tape::input(Mat v) { return push(std::move(v), nullptr); }

u64 Tape::matmul(u64 a, u64 b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.cols() != B.rows()) throw input_error("matmul: inner dimension mismatch");
  Mat C = A * B;
  return push(std::move(C), [a, b](Tape& t, u64 self) {
    const Mat& G = t.grad(self);
    t.grad_mut(a).noalias() += G * t.val(b).transpose();
    t.grad_mut(b).noalias() += t.val(a).transpose() * G;
  });
}

u64 Tape::spmm(const NormalizedOperator& op, u64 x) {
  const Mat& X = val(x);
  if (u64(X.rows()) != op.dim()) throw input_error("spmm: row count does not match operator");
  Mat Y(X.rows(), X.cols());
  for (i64 j = 0; j < X.cols(); ++j) apply(op, X.col(j), Y.col(j));
  // op is symmetric, so the adjoint is the same operator.
  return push(std::move(Y), [&op, x](Tape& t, u64 self) {
    const Mat& G = t.grad(self);
    Mat& GX = t.grad_mut(x);
    Vec tmp(G.rows());
    for (i64 j = 0; j < G.cols(); ++j) {
      apply(op, G.col(j), tmp);
      GX.col(j) += tmp;
    }
  });
}

u64 Tape::add_bias(u64 x, u64 bias) {
  const Mat& X = val(x);
  const Mat& B = val(bias);
  if (B.rows() != 1 || B.cols() != X.cols()) throw input_error("add_bias: bias must be 1 x cols");
  Mat Y = X.rowwise() + B.row(0);
  return push(std::move(Y), [x, bias](Tape& t, u64 self) {
    const Mat& G = t.grad(self);
    t.grad_mut(x) += G;
    t.grad_mut(bias).row(0) += G.colwise().sum();
  });
}

u64 Tape::relu(u64 x) {
  Mat Y = val(x).cwiseMax(0.0);
  // Subgradient at exactly 0 is 0; the mask from the output is equivalent.
  return push(std::move(Y), [x](Tape& t, u64 self) {
    const Mat& G = t.grad(self);
    t.grad_mut(x).array() += G.array() * (t.val(self).array() > 0.0).cast<double>();
  });
}

u64 Tape::dropout(u64 x, double p, Rng& rng) {
  if (!(p > 0.0 && p < 1.0)) throw input_error("dropout: p must be in (0,1)");
  const Mat& X = val(x);
  const double keep = 1.0 - p;
  Mat mask(X.rows(), X.cols());
  for (i64 i = 0; i < X.rows(); ++i)
    for (i64 j = 0; j < X.cols(); ++j)
      mask(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  Mat Y = X.cwiseProduct(mask);
  return push(std::move(Y), [x, mask = std::move(mask)](Tape& t, u64 self) {
    t.grad_mut(x) += t.grad(self).cwiseProduct(mask);
  });
}

u64 Tape::gather_rows(u64 x, std::vector<u64> rows) {
  const Mat& X = val(x);
  Mat Y(i64(rows.size()), X.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= u64(X.rows())) throw input_error("gather_rows: row out of range");
    Y.row(i64(k)) = X.row(i64(rows[k]));
  }
  return push(std::move(Y), [x, rows = std::move(rows)](Tape& t, u64 self) {
    const Mat& G = t.grad(self);
    Mat& GX = t.grad_mut(x);
    for (size_t k = 0; k < rows.size(); ++k) GX.row(i64(rows[k])) += G.row(i64(k));
  });
}

u64 Tape::softmax_xent(u64 logits, std::vector<int> labels) {
  const Mat& Z = val(logits);
  const i64 n = Z.rows();
  const i64 c = Z.cols();
  if (u64(n) != labels.size()) throw input_error("softmax_xent: label count mismatch");
  Mat P(n, c);
  double loss = 0.0;
  for (i64 i = 0; i < n; ++i) {
    if (labels[size_t(i)] < 0 || labels[size_t(i)] >= c)
      throw input_error("softmax_xent: label out of class range");
    const double m = Z.row(i).maxCoeff();
    Eigen::ArrayXd e = (Z.row(i).transpose().array() - m).exp();
    const double s = e.sum();
    P.row(i) = (e / s).matrix().transpose();
    loss -= std::log(P(i, i64(labels[size_t(i)])));
  }
  loss /= double(n);
  Mat out(1, 1);
  out(0, 0) = loss;
  return push(std::move(out),
              [logits, labels = std::move(labels), P = std::move(P)](Tape& t, u64 self) {
                const double scale = t.grad(self)(0, 0) / double(labels.size());
                Mat& GZ = t.grad_mut(logits);
                GZ += scale * P;
                for (size_t i = 0; i < labels.size(); ++i)
                  GZ(i64(i), i64(labels[i])) -= scale;
              });
}

void Tape::backward(u64 id, const Mat& seed, bool retain) {
  if (consumed_) throw state_error("tape already consumed; run a new forward pass");
  if (id >= nodes_.size()) throw input_error("backward: node id out of range");
  const Mat& v = nodes_[id].val;
  if (seed.rows() != v.rows() || seed.cols() != v.cols())
    throw input_error("backward: seed shape mismatch");
  for (auto& n : nodes_) n.grad = Mat::Zero(n.val.rows(), n.val.cols());
  nodes_[id].grad = seed;
  for (u64 i = id + 1; i-- > 0;)
    if (nodes_[i].back) nodes_[i].back(*this, i);
  if (!retain) consumed_ = true;
}

// ---------------------------------------------------------------------------
// Parameters

ModelParams init_params(Arch arch, u64 L, u64 in_dim, u64 hidden, u64 out_dim,
                        double dropout_p, u64 seed) {
  if (L < 1) throw input_error("init_params: L must be >= 1");
  if (in_dim == 0 || out_dim == 0) throw input_error("init_params: zero width");
  if (arch != Arch::SGC && L > 1 && hidden == 0)
    throw input_error("init_params: hidden width must be positive");
  ModelParams p;
  p.arch = arch;
  p.L = L;
  p.in_dim = in_dim;
  p.hidden = hidden;
  p.out_dim = out_dim;
  p.dropout_p = dropout_p;
  Rng rng(seed);
  auto glorot = [&rng](u64 r, u64 c) {
    Mat w = Mat(i64(r), i64(c));
    const double lim = std::sqrt(6.0 / double(r + c));
    for (i64 i = 0; i < w.rows(); ++i)
      for (i64 j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-lim, lim);
    return w;
  };
  if (arch == Arch::SGC) {
    p.W.push_back(glorot(in_dim, out_dim));
    p.b.push_back(Mat::Zero(1, i64(out_dim)));
  } else {
    for (u64 l = 0; l < L; ++l) {
      const u64 r = l == 0 ? in_dim : hidden;
      const u64 c = l + 1 == L ? out_dim : hidden;
      p.W.push_back(glorot(r, c));
      p.b.push_back(Mat::Zero(1, i64(c)));
    }
  }
  return p;
}

namespace {

constexpr char kParamsMagic[6] = {'L', 'R', 'G', 'K', 'M', '1'};

void put_u64(std::ofstream& f, u64 v) { f.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ofstream& f, double v) { f.write(reinterpret_cast<const char*>(&v), 8); }
u64 get_u64(std::ifstream& f) {
  u64 v = 0;
  f.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::ifstream& f) {
  double v = 0;
  f.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void put_mat(std::ofstream& f, const Mat& m) {
  put_u64(f, u64(m.rows()));
  put_u64(f, u64(m.cols()));
  for (i64 i = 0; i < m.rows(); ++i)
    for (i64 j = 0; j < m.cols(); ++j) put_f64(f, m(i, j));
}

Mat get_mat(std::ifstream& f) {
  const u64 r = get_u64(f);
  const u64 c = get_u64(f);
  if (r > (1ull << 32) || c > (1ull << 32)) throw input_error("checkpoint: corrupt matrix header");
  Mat m = Mat(i64(r), i64(c));
  for (i64 i = 0; i < m.rows(); ++i)
    for (i64 j = 0; j < m.cols(); ++j) m(i, j) = get_f64(f);
  return m;
}

}  // namespace

void save_params(const ModelParams& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open for writing: " + path);
  f.write(kParamsMagic, 6);
  f.put(char(u8(p.arch)));
  put_u64(f, p.L);
  put_u64(f, p.in_dim);
  put_u64(f, p.hidden);
  put_u64(f, p.out_dim);
  put_f64(f, p.dropout_p);
  put_u64(f, p.W.size());
  for (size_t l = 0; l < p.W.size(); ++l) {
    put_mat(f, p.W[l]);
    put_mat(f, p.b[l]);
  }
  if (!f) throw input_error("write failed: " + path);
}

ModelParams load_params(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open: " + path);
  char magic[6];
  f.read(magic, 6);
  if (!f || std::memcmp(magic, kParamsMagic, 6) != 0)
    throw input_error("not a model checkpoint: " + path);
  ModelParams p;
  const int a = f.get();
  if (a < 0 || a > 2) throw input_error("checkpoint: bad architecture byte");
  p.arch = Arch(u8(a));
  p.L = get_u64(f);
  p.in_dim = get_u64(f);
  p.hidden = get_u64(f);
  p.out_dim = get_u64(f);
  p.dropout_p = get_f64(f);
  const u64 nt = get_u64(f);
  if (nt > 4096) throw input_error("checkpoint: corrupt tensor count");
  for (u64 l = 0; l < nt; ++l) {
    p.W.push_back(get_mat(f));
    p.b.push_back(get_mat(f));
  }
  if (!f) throw input_error("checkpoint truncated: " + path);
  return p;
}

// ---------------------------------------------------------------------------
// Ego batches

EgoBatch sample_ego(const Graph& g, const Mat& X_full, const std::vector<u64>& seeds,
                    u32 H, u64 cap_per_hop, Rng& rng) {
  if (seeds.empty()) throw input_error("sample_ego: no seeds");
  if (H < 1) throw input_error("sample_ego: H must be >= 1");
  if (u64(X_full.rows()) != g.n_nodes)
    throw input_error("sample_ego: feature rows do not match node count");
  for (u64 s : seeds)
    if (s >= g.n_nodes) throw input_error("sample_ego: seed out of range");

  constexpr u64 kUnset = ~0ull;
  std::vector<u32> best_hop(g.n_nodes, kNoHop);
  std::vector<u64> kept_stamp(g.n_nodes, kUnset);  // seed index that kept the node
  std::vector<u64> cand_stamp(g.n_nodes, kUnset);  // (seed, hop) counter
  std::vector<u8> in_union(g.n_nodes, 0);
  std::vector<u64> members;
  u64 tick = 0;

  auto keep = [&](u64 v, u64 si, u32 h) {
    kept_stamp[v] = si;
    if (h < best_hop[v]) best_hop[v] = h;
    if (!in_union[v]) {
      in_union[v] = 1;
      members.push_back(v);
    }
  };

  std::vector<u64> frontier, next, candidates;
  for (size_t si = 0; si < seeds.size(); ++si) {
    keep(seeds[si], si, 0);
    frontier.assign(1, seeds[si]);
    for (u32 h = 1; h <= H && !frontier.empty(); ++h) {
      ++tick;
      candidates.clear();
      for (u64 u : frontier)
        for (u64 w : g.nbrs(u))
          if (kept_stamp[w] != si && cand_stamp[w] != tick) {
            cand_stamp[w] = tick;
            candidates.push_back(w);
          }
      std::sort(candidates.begin(), candidates.end());
      if (cap_per_hop > 0 && candidates.size() > cap_per_hop) {
        next.clear();
        for (u64 idx : rng.sample_without_replacement(candidates.size(), cap_per_hop))
          next.push_back(candidates[idx]);
        std::sort(next.begin(), next.end());
      } else {
        next = candidates;
      }
      for (u64 w : next) keep(w, si, h);
      frontier = next;
    }
  }

  std::sort(members.begin(), members.end());
  EgoBatch eb;
  eb.sub = induced_subgraph(g, members);
  eb.nodes = members;
  eb.seeds_global = seeds;
  eb.seeds_local.reserve(seeds.size());
  for (u64 s : seeds) {
    const auto it = std::lower_bound(members.begin(), members.end(), s);
    eb.seeds_local.push_back(u64(it - members.begin()));
  }
  eb.hop.reserve(members.size());
  for (u64 v : members) eb.hop.push_back(best_hop[v]);
  eb.X.resize(i64(members.size()), X_full.cols());
  for (size_t k = 0; k < members.size(); ++k)
    eb.X.row(i64(k)) = X_full.row(i64(members[k]));
  return eb;
}

// ---------------------------------------------------------------------------
// Forward

ForwardPass forward(const ModelParams& p, const NormalizedOperator* op,
                    const Mat& X, bool training, Rng* drop_rng) {
  if (u64(X.cols()) != p.in_dim) throw input_error("forward: feature width mismatch");
  if (p.arch != Arch::MLP) {
    if (op == nullptr) throw input_error("forward: graph architectures need an operator");
    if (op->dim() != u64(X.rows()))
      throw input_error("forward: operator dimension does not match node count");
  }
  const bool drop = training && p.dropout_p > 0.0;
  if (drop && drop_rng == nullptr) throw input_error("forward: dropout needs an rng");

  ForwardPass fp;
  Tape& t = fp.tape;
  fp.x_id = t.input(X);
  fp.w_ids.reserve(p.W.size());
  fp.b_ids.reserve(p.b.size());
  for (size_t l = 0; l < p.W.size(); ++l) {
    fp.w_ids.push_back(t.input(p.W[l]));
    fp.b_ids.push_back(t.input(p.b[l]));
  }

  u64 h = fp.x_id;
  if (p.arch == Arch::SGC) {
    for (u64 l = 0; l < p.L; ++l) h = t.spmm(*op, h);
    h = t.add_bias(t.matmul(h, fp.w_ids[0]), fp.b_ids[0]);
  } else {
    for (u64 l = 0; l < p.L; ++l) {
      if (p.arch == Arch::GCN) h = t.spmm(*op, h);
      h = t.add_bias(t.matmul(h, fp.w_ids[l]), fp.b_ids[l]);
      if (l + 1 < p.L) {
        h = t.relu(h);
        if (drop) h = t.dropout(h, p.dropout_p, *drop_rng);
      }
    }
  }
  fp.logits_id = h;
  return fp;
}

Mat eval_logits(const ModelParams& p, const Graph& g, const Mat& X,
                const std::vector<u64>& seeds, double gamma) {
  std::optional<NormalizedOperator> op;
  const NormalizedOperator* opp = nullptr;
  if (p.arch != Arch::MLP) {
    op.emplace(make_operator(g, OperatorKind::SAug, gamma));
    opp = &*op;
  }
  ForwardPass fp = forward(p, opp, X, false, nullptr);
  const Mat& Z = fp.tape.val(fp.logits_id);
  Mat out(i64(seeds.size()), Z.cols());
  for (size_t k = 0; k < seeds.size(); ++k) {
    if (seeds[k] >= u64(Z.rows())) throw input_error("eval_logits: seed out of range");
    out.row(i64(k)) = Z.row(i64(seeds[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

TrainConfig train_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("train config: ") + e.what());
  }
  try {
    TrainConfig c;
    c.arch = parse_arch(j.at("architecture").get<std::string>());
    c.L = j.at("L").get<u64>();
    c.H = j.at("H").get<u32>();
    if (j.contains("hidden")) c.hidden = j["hidden"].get<u64>();
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("wd")) c.weight_decay = j["wd"].get<double>();
    if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<u64>();
    if (j.contains("record_window")) c.record_window = j["record_window"].get<u64>();
    if (j.contains("seed")) c.seed = j["seed"].get<u64>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<u64>();
    if (j.contains("cap_per_hop")) c.cap_per_hop = j["cap_per_hop"].get<u64>();
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (c.L < 1) throw input_error("train config: L must be >= 1");
    if (c.H < 1) throw input_error("train config: H must be >= 1");
    if (c.epochs < 1) throw input_error("train config: epochs must be >= 1");
    if (c.record_window < 1) throw input_error("train config: record_window must be >= 1");
    if (!(c.dropout >= 0.0 && c.dropout < 1.0))
      throw input_error("train config: dropout must be in [0,1)");
    if (!(c.gamma > 0.0)) throw input_error("train config: gamma must be positive");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("train config: ") + e.what());
  }
}

std::string train_config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["architecture"] = arch_name(cfg.arch);
  j["L"] = cfg.L;
  j["H"] = cfg.H;
  j["hidden"] = cfg.hidden;
  j["lr"] = cfg.lr;
  j["wd"] = cfg.weight_decay;
  j["dropout"] = cfg.dropout;
  j["epochs"] = cfg.epochs;
  j["record_window"] = cfg.record_window;
  j["seed"] = cfg.seed;
  j["batch_size"] = cfg.batch_size;
  j["cap_per_hop"] = cfg.cap_per_hop;
  j["gamma"] = cfg.gamma;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct AdamState {
  std::vector<Mat> mw, vw, mb, vb;
  u64 t = 0;
};

AdamState make_adam(const ModelParams& p) {
  AdamState s;
  for (size_t l = 0; l < p.W.size(); ++l) {
    s.mw.push_back(Mat::Zero(p.W[l].rows(), p.W[l].cols()));
    s.vw.push_back(Mat::Zero(p.W[l].rows(), p.W[l].cols()));
    s.mb.push_back(Mat::Zero(p.b[l].rows(), p.b[l].cols()));
    s.vb.push_back(Mat::Zero(p.b[l].rows(), p.b[l].cols()));
  }
  return s;
}

void adam_update(Mat& theta, const Mat& grad, Mat& m, Mat& v, u64 t, double lr,
                 double wd) {
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(kBeta1, double(t));
  const double bc2 = 1.0 - std::pow(kBeta2, double(t));
  // Decoupled weight decay: the decay term bypasses the adaptive scaling.
  theta.array() -= lr * ((m.array() / bc1) / ((v.array() / bc2).sqrt() + kAdamEps) +
                         wd * theta.array());
}

void adam_step(ModelParams& p, const ForwardPass& fp, AdamState& s, double lr,
               double wd) {
  ++s.t;
  for (size_t l = 0; l < p.W.size(); ++l) {
    adam_update(p.W[l], fp.tape.grad(fp.w_ids[l]), s.mw[l], s.vw[l], s.t, lr, wd);
    adam_update(p.b[l], fp.tape.grad(fp.b_ids[l]), s.mb[l], s.vb[l], s.t, lr, wd);
  }
}

std::vector<u64> split_indices(const FeatureTable& ft, u8 kind) {
  std::vector<u64> idx;
  for (size_t i = 0; i < ft.split.size(); ++i)
    if (ft.split[i] == kind) idx.push_back(i);
  return idx;
}

}  // namespace

TrainResult train(const Graph& g, const FeatureTable& ft, const TrainConfig& cfg) {
  if (!ft.has_labels()) throw input_error("train: dataset has no labels");
  if (!ft.has_split()) throw input_error("train: dataset has no split");
  if (u64(ft.X.rows()) != g.n_nodes)
    throw input_error("train: feature rows do not match node count");
  int n_classes = 0;
  for (int y : ft.y) {
    if (y < 0) throw input_error("train: negative label");
    n_classes = std::max(n_classes, y + 1);
  }
  const bool graph_arch = cfg.arch != Arch::MLP;
  if (graph_arch && cfg.batch_size == 0 && u64(cfg.H) < cfg.L)
    throw input_error("train: full-graph batches need H >= L; set batch_size when H < L");

  const std::vector<u64> val_idx = split_indices(ft, kVal);
  std::vector<u64> train_idx = split_indices(ft, kTrain);
  if (train_idx.empty()) throw input_error("train: empty training split");
  if (val_idx.empty()) throw input_error("train: empty validation split");

  ModelParams params = init_params(cfg.arch, cfg.L, u64(ft.X.cols()), cfg.hidden,
                                   u64(n_classes), cfg.dropout, cfg.seed);
  AdamState adam = make_adam(params);

  std::optional<NormalizedOperator> full_op;
  if (graph_arch && cfg.batch_size == 0)
    full_op.emplace(make_operator(g, OperatorKind::SAug, cfg.gamma));

  std::vector<int> full_labels(train_idx.size());
  for (size_t k = 0; k < train_idx.size(); ++k) full_labels[k] = ft.y[train_idx[k]];

  // Per-seed ego balls are deterministic when no cap binds; cache them.
  const bool cache_batches = cfg.batch_size == 1 && cfg.cap_per_hop == 0;
  std::unordered_map<u64, EgoBatch> ball_cache;

  TrainResult res;
  res.best_val_acc = -1.0;
  const u64 eval_seed = seed_mix(cfg.seed, 0xE7A1);

  for (u64 epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng(seed_mix(cfg.seed, epoch));
    double epoch_loss = 0.0;

    if (cfg.batch_size == 0 || !graph_arch) {
      const NormalizedOperator* opp = full_op ? &*full_op : nullptr;
      ForwardPass fp = forward(params, opp, ft.X, true, &erng);
      const u64 seed_logits = fp.tape.gather_rows(fp.logits_id, train_idx);
      const u64 loss_id = fp.tape.softmax_xent(seed_logits, full_labels);
      epoch_loss = fp.tape.val(loss_id)(0, 0);
      if (!std::isfinite(epoch_loss))
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch + 1));
      Mat one(1, 1);
      one(0, 0) = 1.0;
      fp.tape.backward(loss_id, one);
      adam_step(params, fp, adam, cfg.lr, cfg.weight_decay);
    } else {
      erng.shuffle(train_idx);
      u64 done = 0;
      while (done < train_idx.size()) {
        const u64 take = std::min<u64>(cfg.batch_size, train_idx.size() - done);
        std::vector<u64> seeds(train_idx.begin() + i64(done),
                               train_idx.begin() + i64(done + take));
        done += take;

        const EgoBatch* ebp = nullptr;
        EgoBatch scratch;
        if (cache_batches) {
          auto it = ball_cache.find(seeds[0]);
          if (it == ball_cache.end()) {
            it = ball_cache.emplace(seeds[0], sample_ego(g, ft.X, seeds, cfg.H,
                                                         cfg.cap_per_hop, erng))
                     .first;
          }
          ebp = &it->second;
        } else {
          scratch = sample_ego(g, ft.X, seeds, cfg.H, cfg.cap_per_hop, erng);
          ebp = &scratch;
        }
        const EgoBatch& eb = *ebp;

        std::optional<NormalizedOperator> sub_op;
        const NormalizedOperator* opp = nullptr;
        if (graph_arch) {
          sub_op.emplace(make_operator(eb.sub, OperatorKind::SAug, cfg.gamma));
          opp = &*sub_op;
        }
        ForwardPass fp = forward(params, opp, eb.X, true, &erng);
        std::vector<int> labels(seeds.size());
        for (size_t k = 0; k < seeds.size(); ++k) labels[k] = ft.y[seeds[k]];
        const u64 seed_logits = fp.tape.gather_rows(fp.logits_id, eb.seeds_local);
        const u64 loss_id = fp.tape.softmax_xent(seed_logits, std::move(labels));
        const double loss = fp.tape.val(loss_id)(0, 0);
        if (!std::isfinite(loss))
          throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch + 1));
        epoch_loss += loss * double(take);
        Mat one(1, 1);
        one(0, 0) = 1.0;
        fp.tape.backward(loss_id, one);
        adam_step(params, fp, adam, cfg.lr, cfg.weight_decay);
      }
      epoch_loss /= double(train_idx.size());
    }

    const bool record =
        (epoch + 1) % cfg.record_window == 0 || epoch + 1 == cfg.epochs;
    if (record) {
      const double val_acc = evaluate(params, g, ft, kVal, cfg.H, cfg.cap_per_hop,
                                      eval_seed, cfg.gamma);
      res.history.push_back(HistoryRow{epoch + 1, epoch_loss, val_acc});
      if (val_acc >= res.best_val_acc) {
        res.best_val_acc = val_acc;
        res.best_epoch = epoch + 1;
        res.params = params;
      }
    }
  }
  return res;
}

double evaluate(const ModelParams& p, const Graph& g, const FeatureTable& ft,
                u8 split_kind, u32 H, u64 cap_per_hop, u64 seed, double gamma) {
  if (!ft.has_labels()) throw input_error("evaluate: dataset has no labels");
  if (!ft.has_split()) throw input_error("evaluate: dataset has no split");
  const std::vector<u64> idx = split_indices(ft, split_kind);
  if (idx.empty()) return 0.0;

  u64 correct = 0;
  if (p.arch == Arch::MLP || u64(H) >= p.L) {
    // Beyond-L features cannot reach a seed, so the full-graph pass is exact.
    const Mat Z = eval_logits(p, g, ft.X, idx, gamma);
    for (size_t k = 0; k < idx.size(); ++k)
      if (argmax_row(Z, k) == u64(ft.y[idx[k]])) ++correct;
  } else {
    std::vector<u8> hit(idx.size(), 0);
    parallel_for(idx.size(), [&](size_t lo, size_t hi) {
      for (size_t k = lo; k < hi; ++k) {
        const u64 v = idx[k];
        Rng rng(seed_mix(seed, v));
        const EgoBatch eb = sample_ego(g, ft.X, {v}, H, cap_per_hop, rng);
        const NormalizedOperator op = make_operator(eb.sub, OperatorKind::SAug, gamma);
        ForwardPass fp = forward(p, &op, eb.X, false, nullptr);
        const Mat& Z = fp.tape.val(fp.logits_id);
        if (argmax_row(Z, eb.seeds_local[0]) == u64(ft.y[v])) hit[k] = 1;
      }
    });
    for (u8 h : hit) correct += h;
  }
  return double(correct) / double(idx.size());
}

void save_history(const std::vector<HistoryRow>& rows, const std::string& path) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"epoch", "train_loss", "val_acc"});
  for (const auto& r : rows)
    table.push_back({std::to_string(r.epoch), fmt_double(r.train_loss),
                     fmt_double(r.val_acc)});
  write_csv(path, table);
}

}  // namespace lrgk
