#include "lrgk/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>

#include <json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/netstats.hpp"
#include "lrgk/rng.hpp"

namespace lrgk {

NormalizedOperator make_operator(const Graph& g, OperatorKind kind, double gamma) {
  if (kind == OperatorKind::SAug && gamma <= 0)
    throw input_error("make_operator: gamma must be > 0");
  NormalizedOperator op;
  op.g = &g;
  op.kind = kind;
  op.gamma = kind == OperatorKind::SAug ? gamma : 0.0;
  op.dinv_sqrt.resize(g.n_nodes);
  for (u64 v = 0; v < g.n_nodes; ++v) {
    const double d = op.gamma + static_cast<double>(g.degree(v));
    op.dinv_sqrt[v] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  return op;
}

void apply(const NormalizedOperator& op, CVecRef x, VecRef y) {
  const Graph& g = *op.g;
  if (static_cast<u64>(x.size()) != g.n_nodes ||
      static_cast<u64>(y.size()) != g.n_nodes)
    throw input_error("apply: dimension mismatch");
  for (u64 v = 0; v < g.n_nodes; ++v) {
    double acc = 0;
    for (u64 u : g.nbrs(v)) acc += op.dinv_sqrt[u] * x[static_cast<i64>(u)];
    acc *= op.dinv_sqrt[v];
    if (op.kind == OperatorKind::SAug)
      acc += op.gamma * op.dinv_sqrt[v] * op.dinv_sqrt[v] * x[static_cast<i64>(v)];
    y[static_cast<i64>(v)] = op.kind == OperatorKind::LSym
                                 ? x[static_cast<i64>(v)] - acc
                                 : acc;
  }
}

Vec apply(const NormalizedOperator& op, CVecRef x) {
  Vec y(x.size());
  apply(op, x, y);
  return y;
}

Vec principal_eigenvector(const NormalizedOperator& op) {
  if (op.kind == OperatorKind::LSym)
    throw input_error("principal_eigenvector: defined for the S operators");
  const Graph& g = *op.g;
  Vec u(static_cast<i64>(g.n_nodes));
  for (u64 v = 0; v < g.n_nodes; ++v)
    u[static_cast<i64>(v)] =
        std::sqrt(op.gamma + static_cast<double>(g.degree(v)));
  u.normalize();
  return u;
}

double bound_lambda(u64 d_max, u64 diam) {
  if (d_max < 2) throw input_error("bound_lambda: d_max must be >= 2");
  if (diam < 4) throw input_error("bound_lambda: diam must be >= 4");
  return bound_lambda_scalar(static_cast<double>(d_max),
                             static_cast<double>(diam));
}

namespace {

// Deterministic start for power iteration. An all-ones start is invariant
// under lattice symmetries and can be exactly orthogonal to the target
// eigenspace, so use a ramp, which has generic overlap.
Vec ramp_start(u64 n) {
  Vec x(static_cast<i64>(n));
  for (u64 i = 0; i < n; ++i)
    x[static_cast<i64>(i)] =
        1.0 + static_cast<double>(i + 1) / static_cast<double>(n);
  return x;
}

void project_out(Vec& x, const std::vector<Vec>& basis) {
  for (const Vec& u : basis) x -= u * u.dot(x);
}

// Power iteration for the dominant (largest |lambda|) eigenpair of the
// symmetric operator mv restricted to the complement of `deflate`.
EigPair power_dominant(const std::function<void(const Vec&, Vec&)>& mv, u64 n,
                       const std::vector<Vec>& deflate, double tol,
                       u64 max_iter) {
  Vec x = ramp_start(n);
  project_out(x, deflate);
  if (x.norm() < 1e-12) {
    Rng rng(0x5EED5EEDULL);
    for (u64 i = 0; i < n; ++i) x[static_cast<i64>(i)] = rng.uniform() - 0.5;
    project_out(x, deflate);
  }
  x.normalize();
  Vec y(static_cast<i64>(n));
  EigPair out;
  for (u64 t = 1; t <= max_iter; ++t) {
    mv(x, y);
    project_out(y, deflate);
    const double lambda = x.dot(y);  // Rayleigh quotient at unit x
    const double residual = (y - lambda * x).norm();
    out.value = lambda;
    out.residual = residual;
    out.iters = t;
    if (residual <= tol) {
      out.converged = true;
      out.vector = x;
      return out;
    }
    const double norm = y.norm();
    if (norm < 1e-300) {  // annihilated: the complement spectrum is ~0
      out.value = 0.0;
      out.residual = 0.0;
      out.converged = true;
      out.vector = x;
      return out;
    }
    x = y / norm;
  }
  out.vector = x;
  out.converged = false;
  return out;
}

Mat dense_sym_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

std::vector<EigPair> top_eigs(const NormalizedOperator& op, int k, double tol,
                              u64 max_iter) {
  const u64 n = op.dim();
  if (n == 0) throw input_error("top_eigs: empty operator");
  k = std::min<int>(k, static_cast<int>(n));
  std::vector<EigPair> out;
  std::vector<Vec> deflate;

  if (op.kind != OperatorKind::LSym) {
    // lambda_N = 1 with the closed-form eigenvector; accept when its
    // residual passes tol (always, for connected graphs).
    Vec u = principal_eigenvector(op);
    const Vec r = apply(op, u) - u;
    EigPair top;
    top.value = 1.0;
    top.vector = u;
    top.residual = r.norm();
    top.converged = top.residual <= tol;
    out.push_back(top);
    deflate.push_back(std::move(u));
  }

  // Shift by +I: spectra live in [-1, 1] (S) or [0, 2] (LSym), so op + I is
  // PSD and the dominant eigenvalue of the shifted operator is the
  // algebraically largest of op.
  const auto mv_shifted = [&op](const Vec& x, Vec& y) {
    apply(op, x, y);
    y += x;
  };
  while (static_cast<int>(out.size()) < k) {
    EigPair p = power_dominant(mv_shifted, n, deflate, tol, max_iter);
    p.value -= 1.0;
    out.push_back(p);
    deflate.push_back(out.back().vector);
  }
  return out;
}

EigPair bottom_eig(const NormalizedOperator& op, double tol, u64 max_iter) {
  const u64 n = op.dim();
  if (n == 0) throw input_error("bottom_eig: empty operator");
  // cI - op is PSD when c bounds the spectrum from above (1 for the S
  // operators, 2 for LSym); its dominant eigenvalue is c - lambda_1(op).
  const double c = op.kind == OperatorKind::LSym ? 2.0 : 1.0;
  const auto mv = [&op, c](const Vec& x, Vec& y) {
    apply(op, x, y);
    y = c * x - y;
  };
  EigPair p = power_dominant(mv, n, {}, tol, max_iter);
  p.value = c - p.value;
  return p;
}

Mat densify(const NormalizedOperator& op) {
  const Graph& g = *op.g;
  const i64 n = static_cast<i64>(g.n_nodes);
  Mat m = Mat::Zero(n, n);
  for (u64 v = 0; v < g.n_nodes; ++v)
    for (u64 u : g.nbrs(v))
      m(static_cast<i64>(v), static_cast<i64>(u)) =
          op.dinv_sqrt[v] * op.dinv_sqrt[u];
  if (op.kind == OperatorKind::SAug)
    for (u64 v = 0; v < g.n_nodes; ++v)
      m(static_cast<i64>(v), static_cast<i64>(v)) =
          op.gamma * op.dinv_sqrt[v] * op.dinv_sqrt[v];
  if (op.kind == OperatorKind::LSym) {
    m = -m;
    m.diagonal().array() += 1.0;
  }
  return m;
}

ComplementarityResult verify_complementarity(const Graph& g, double tol) {
  if (g.n_nodes > 500)
    throw input_error("verify_complementarity: graph too large for dense check");
  const Mat s = densify(make_operator(g, OperatorKind::SAdj));
  const Mat l = densify(make_operator(g, OperatorKind::LSym));
  const Mat es = dense_sym_eigenvalues(s);  // ascending
  const Mat el = dense_sym_eigenvalues(l);
  const i64 n = es.rows();
  double dev = 0;
  for (i64 i = 0; i < n; ++i)
    dev = std::max(dev, std::abs(es(n - 1 - i, 0) - (1.0 - el(i, 0))));
  return {dev < tol, dev};
}

SelfLoopShiftResult verify_selfloop_shift(const Graph& g, double gamma, double tol) {
  if (g.n_nodes > 500)
    throw input_error("verify_selfloop_shift: graph too large for dense check");
  if (g.n_nodes < 2)
    throw input_error("verify_selfloop_shift: need at least two nodes");
  if (!is_connected(g))
    throw input_error("verify_selfloop_shift: graph must be connected");
  const Mat aug = densify(make_operator(g, OperatorKind::SAug, gamma));
  const Mat plain = densify(make_operator(g, OperatorKind::SAdj));
  const Mat ea = dense_sym_eigenvalues(aug);
  const Mat ep = dense_sym_eigenvalues(plain);
  const i64 n = ea.rows();
  SelfLoopShiftResult r;
  r.lambda_aug = ea(n - 2, 0);
  r.lambda_plain = ep(n - 2, 0);
  r.pass = r.lambda_aug > r.lambda_plain + tol;
  return r;
}

std::vector<double> oversmoothing_decay(const Graph& g, u32 L) {
  const NormalizedOperator op = make_operator(g, OperatorKind::SAug, 1.0);
  const u64 n = op.dim();
  std::vector<Vec> deflate = {principal_eigenvector(op)};
  std::vector<double> curve(L, 0.0);
  Vec tmp(static_cast<i64>(n));
  for (u32 l = 1; l <= L; ++l) {
    // M_l = (I - u u^T) S^l. Iterate on M_l^2 so mixed-sign spectra cannot
    // stall the Rayleigh quotient; ||M_l|| = sqrt(dominant eig of M_l^2).
    const auto mv2 = [&](const Vec& x, Vec& y) {
      y = x;
      for (u32 rep = 0; rep < 2; ++rep) {
        for (u32 i = 0; i < l; ++i) {
          apply(op, y, tmp);
          y.swap(tmp);
        }
        project_out(y, deflate);
      }
    };
    const EigPair p = power_dominant(mv2, n, deflate, 1e-10, 100000);
    curve[l - 1] = std::sqrt(std::max(0.0, p.value));
  }
  return curve;
}

SpectralReport make_spectral_report(const Graph& g, double gamma, u32 decay_depth) {
  SpectralReport r;
  r.n_nodes = g.n_nodes;
  r.gamma = gamma;
  const NormalizedOperator op = make_operator(g, OperatorKind::SAug, gamma);
  const auto tops = top_eigs(op, 2);
  r.lambda_N = tops[0].value;
  r.lambda_N_residual = tops[0].residual;
  if (tops.size() > 1) {
    r.lambda_N_minus_1 = tops[1].value;
    r.lambda_N_minus_1_residual = tops[1].residual;
  }
  const EigPair bottom = bottom_eig(op);
  r.lambda_1 = bottom.value;
  r.lambda_1_residual = bottom.residual;
  r.all_converged = tops[0].converged && bottom.converged &&
                    (tops.size() < 2 || tops[1].converged);
  auto [mu, sigma, dmax] = degree_stats(g);
  (void)mu;
  (void)sigma;
  r.d_max = dmax;
  r.diam_estimate = diameter_estimate(g);
  r.bound_valid = r.d_max >= 2 && r.diam_estimate >= 4;
  if (r.bound_valid) r.bound_value = bound_lambda(r.d_max, r.diam_estimate);
  if (decay_depth > 0) r.decay_curve = oversmoothing_decay(g, decay_depth);
  return r;
}

std::string report_json(const SpectralReport& r) {
  nlohmann::json j;
  j["n_nodes"] = r.n_nodes;
  j["gamma"] = r.gamma;
  j["lambda_N"] = {{"value", r.lambda_N}, {"residual", r.lambda_N_residual}};
  j["lambda_N_minus_1"] = {{"value", r.lambda_N_minus_1},
                           {"residual", r.lambda_N_minus_1_residual}};
  j["lambda_1"] = {{"value", r.lambda_1}, {"residual", r.lambda_1_residual}};
  j["all_converged"] = r.all_converged;
  j["d_max"] = r.d_max;
  j["diam_estimate"] = r.diam_estimate;
  if (r.bound_valid) j["bound_value"] = r.bound_value;
  else j["bound_value"] = nullptr;
  j["decay_curve"] = r.decay_curve;
  return j.dump(2);
}

}  // namespace lrgk
