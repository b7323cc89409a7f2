#include "lrgk/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lrgk/errors.hpp"

namespace lrgk::oracle {

namespace {

// Hop distances by a hand-rolled BFS ring buffer; kNoHop marks unreachable.
std::vector<u32> bfs_all(const Graph& g, u64 source) {
  std::vector<u32> hop(g.n_nodes, kNoHop);
  std::vector<u64> queue;
  queue.reserve(g.n_nodes);
  hop[source] = 0;
  queue.push_back(source);
  for (size_t head = 0; head < queue.size(); ++head) {
    const u64 u = queue[head];
    for (u64 w : g.nbrs(u))
      if (hop[w] == kNoHop) {
        hop[w] = hop[u] + 1;
        queue.push_back(w);
      }
  }
  return hop;
}

}  // namespace

std::vector<double> exact_eccentricity(const Graph& g, bool weighted) {
  if (g.n_nodes > 1000) throw input_error("oracle: size cap exceeded (n <= 1000)");
  std::vector<double> ecc(g.n_nodes, 0.0);
  for (u64 s = 0; s < g.n_nodes; ++s) {
    double mx = 0.0;
    if (weighted) {
      // Array-scan shortest paths; the ascending scan with strict < settles
      // equal-distance nodes lowest id first.
      std::vector<double> dist(g.n_nodes, kInfDist);
      std::vector<u8> done(g.n_nodes, 0);
      dist[s] = 0.0;
      for (u64 round = 0; round < g.n_nodes; ++round) {
        u64 best = g.n_nodes;
        for (u64 v = 0; v < g.n_nodes; ++v)
          if (!done[v] && dist[v] < kInfDist &&
              (best == g.n_nodes || dist[v] < dist[best]))
            best = v;
        if (best == g.n_nodes) break;
        done[best] = 1;
        const auto nb = g.nbrs(best);
        const auto wt = g.nbr_weights(best);
        for (size_t k = 0; k < nb.size(); ++k) {
          const double nd = dist[best] + wt[k];
          if (nd < dist[nb[k]]) dist[nb[k]] = nd;
        }
      }
      for (double d : dist)
        if (d < kInfDist && d > mx) mx = d;
    } else {
      for (u32 h : bfs_all(g, s))
        if (h != kNoHop && double(h) > mx) mx = double(h);
    }
    ecc[s] = mx;
  }
  return ecc;
}

u64 exact_diameter(const Graph& g) {
  if (g.n_nodes > 2000) throw input_error("oracle: size cap exceeded (n <= 2000)");
  if (g.n_nodes == 0) throw input_error("oracle: empty graph");
  u64 diam = 0;
  for (u64 s = 0; s < g.n_nodes; ++s) {
    for (u32 h : bfs_all(g, s)) {
      if (h == kNoHop) throw input_error("oracle: graph is disconnected");
      if (u64(h) > diam) diam = u64(h);
    }
  }
  return diam;
}

DenseEigs dense_eigs(const Mat& m, double tol) {
  if (m.rows() != m.cols()) throw input_error("dense_eigs: matrix is not square");
  if (m.rows() > 500) throw input_error("dense_eigs: size cap exceeded (n <= 500)");
  if (m.rows() == 0) throw input_error("dense_eigs: empty matrix");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) throw input_error("dense_eigs: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_eigs: eigensolver failed to converge");
  DenseEigs out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

Mat finite_diff_jacobian(const std::function<Vec(const Mat&)>& eval, Mat X,
                         double step) {
  if (!(step >= 1e-7 && step <= 1e-3))
    throw input_error("finite_diff_jacobian: step outside [1e-7, 1e-3]");
  const Vec base = eval(X);
  const i64 n_classes = base.size();
  const i64 n = X.rows();
  const i64 f = X.cols();
  Mat jac(n_classes, n * f);
  for (i64 u = 0; u < n; ++u)
    for (i64 j = 0; j < f; ++j) {
      const double x0 = X(u, j);
      X(u, j) = x0 + step;
      const Vec up = eval(X);
      X(u, j) = x0 - step;
      const Vec dn = eval(X);
      X(u, j) = x0;
      jac.col(u * f + j) = (up - dn) / (2.0 * step);
    }
  return jac;
}

}  // namespace lrgk::oracle
