#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lrgk/graph.hpp"
#include "lrgk/types.hpp"

namespace lrgk {

enum class OperatorKind { SAdj, SAug, LSym };

// Matrix-free symmetric operator over a Graph's topology (weights ignored):
//   SAdj: D^{-1/2} A D^{-1/2}
//   SAug: (gI+D)^{-1/2} (gI+A) (gI+D)^{-1/2}   (gamma self-loops)
//   LSym: I - SAdj
struct NormalizedOperator {
  const Graph* g = nullptr;
  OperatorKind kind = OperatorKind::SAug;
  double gamma = 1.0;
  std::vector<double> dinv_sqrt;  // (gamma_eff + deg)^{-1/2} per node
  u64 dim() const { return g ? g->n_nodes : 0; }
};

NormalizedOperator make_operator(const Graph& g, OperatorKind kind,
                                 double gamma = 1.0);

// y = op x in O(|E|).
void apply(const NormalizedOperator& op, CVecRef x, VecRef y);
Vec apply(const NormalizedOperator& op, CVecRef x);

// Closed-form top eigenvector of SAdj/SAug (entries prop. to
// sqrt(gamma_eff + deg)), normalized.
Vec principal_eigenvector(const NormalizedOperator& op);

// Second-largest-eigenvalue bound from max degree and diameter:
//   2 sqrt(d_max-1)/d_max - (2/diam)(1 + 2 sqrt(d_max-1)/d_max)
// Requires d_max >= 2 and diam >= 4.
template <class S>
S bound_lambda_scalar(S d_max, S diam) {
  const S b = S(2) * std::sqrt(d_max - S(1)) / d_max;
  return b - (S(2) / diam) * (S(1) + b);
}
double bound_lambda(u64 d_max, u64 diam);

struct EigPair {
  double value = 0;
  Vec vector;
  double residual = 0;
  bool converged = false;
  u64 iters = 0;
};

// Top-k algebraically largest eigenpairs by shifted power iteration with
// deflation (residual stopping rule; closed-form principal vector used for
// the S operators). Non-convergence is reported via converged/residual.
std::vector<EigPair> top_eigs(const NormalizedOperator& op, int k = 2,
                              double tol = 1e-10, u64 max_iter = 100000);

// Algebraically smallest eigenvalue via power iteration on (I - op).
EigPair bottom_eig(const NormalizedOperator& op, double tol = 1e-10,
                   u64 max_iter = 100000);

Mat densify(const NormalizedOperator& op);

struct ComplementarityResult {
  bool pass = false;
  double max_deviation = 0;
};
// Sorted spectra satisfy lambda_{N+1-i}(SAdj) = 1 - lambda_i(LSym); both
// sides eigendecomposed independently (dense, n <= 500).
ComplementarityResult verify_complementarity(const Graph& g, double tol);

struct SelfLoopShiftResult {
  bool pass = false;
  double lambda_aug = 0, lambda_plain = 0;
};
// lambda_{N-1}(SAug(gamma)) > lambda_{N-1}(SAdj) with margin tol (dense).
SelfLoopShiftResult verify_selfloop_shift(const Graph& g, double gamma, double tol);

// curve[l-1] = || (I - u_N u_N^T) SAug^l ||_2 for l = 1..L. Each point is
// measured by power iteration on the squared depth-l operator (sign-free),
// not read off an eigendecomposition.
std::vector<double> oversmoothing_decay(const Graph& g, u32 L);

struct SpectralReport {
  u64 n_nodes = 0;
  double gamma = 1.0;
  double lambda_N = 0, lambda_N_residual = 0;
  double lambda_N_minus_1 = 0, lambda_N_minus_1_residual = 0;
  double lambda_1 = 0, lambda_1_residual = 0;
  bool all_converged = false;
  u64 d_max = 0;
  u64 diam_estimate = 0;
  bool bound_valid = false;  // requires diam >= 4 and d_max >= 2
  double bound_value = 0;
  std::vector<double> decay_curve;  // index l-1
};

SpectralReport make_spectral_report(const Graph& g, double gamma, u32 decay_depth);
std::string report_json(const SpectralReport& r);

}  // namespace lrgk
