#include "doctest.h"

#include <cmath>
#include <vector>

#include "lrgk/errors.hpp"
#include "lrgk/graph.hpp"
#include "lrgk/oracle.hpp"
#include "lrgk/rng.hpp"
#include "lrgk/spectral.hpp"

using namespace lrgk;

namespace {

Graph make_path(u64 n) {
  GraphBuilder b(n);
  for (u64 i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1, 1.0);
  return b.build();
}

Graph make_cycle(u64 n) {
  GraphBuilder b(n);
  for (u64 i = 0; i < n; ++i) b.add_edge(i, (i + 1) % n, 1.0);
  return b.build();
}

Graph make_grid(u64 rows, u64 cols) {
  GraphBuilder b(rows * cols);
  for (u64 r = 0; r < rows; ++r)
    for (u64 c = 0; c < cols; ++c) {
      const u64 v = r * cols + c;
      if (c + 1 < cols) b.add_edge(v, v + 1, 1.0);
      if (r + 1 < rows) b.add_edge(v, v + cols, 1.0);
    }
  return b.build();
}

Graph random_connected(u64 n, double p, u64 seed) {
  Rng r(seed);
  GraphBuilder b(n);
  for (u64 i = 1; i < n; ++i) b.add_edge(i, r.below(i), 1.0);
  for (u64 i = 0; i < n; ++i)
    for (u64 j = i + 2; j < n; ++j)
      if (r.bernoulli(p)) b.add_edge(i, j, 1.0);
  return b.build();
}

// dense augmented operator built entrywise from degrees, independent of the
// matrix-free code path under test
Mat dense_saug(const Graph& g, double gamma) {
  const i64 n = i64(g.n_nodes);
  Mat m = Mat::Zero(n, n);
  std::vector<double> ds(g.n_nodes);
  for (u64 v = 0; v < g.n_nodes; ++v)
    ds[v] = 1.0 / std::sqrt(gamma + double(g.degree(v)));
  for (u64 v = 0; v < g.n_nodes; ++v) {
    m(i64(v), i64(v)) = gamma * ds[v] * ds[v];
    for (u64 u : g.nbrs(v)) m(i64(v), i64(u)) = ds[v] * ds[u];
  }
  return m;
}

Mat dense_sadj(const Graph& g) {
  const i64 n = i64(g.n_nodes);
  Mat m = Mat::Zero(n, n);
  std::vector<double> ds(g.n_nodes);
  for (u64 v = 0; v < g.n_nodes; ++v) ds[v] = 1.0 / std::sqrt(double(g.degree(v)));
  for (u64 v = 0; v < g.n_nodes; ++v)
    for (u64 u : g.nbrs(v)) m(i64(v), i64(u)) = ds[v] * ds[u];
  return m;
}

}  // namespace

TEST_CASE("apply: two-node augmented operator averages") {
  Graph g = make_path(2);
  auto op = make_operator(g, OperatorKind::SAug, 1.0);
  Vec x(2);
  x << 1.0, 0.0;
  Vec y = apply(op, x);
  CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.5).epsilon(1e-15));

  // full operator is [[1/2,1/2],[1/2,1/2]]
  Mat d = densify(op);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(d(i, j) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("apply: normalized adjacency on a 3-path hits e0's column") {
  Graph g = make_path(3);
  auto op = make_operator(g, OperatorKind::SAdj);
  Vec e0 = Vec::Zero(3);
  e0[0] = 1.0;
  Vec y = apply(op, e0);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(y[2] == 0.0);
}

TEST_CASE("apply: symmetric Laplacian kills its constant eigenfunction") {
  for (u64 seed : {1, 2}) {
    Graph g = random_connected(30, 0.1, seed);
    auto op = make_operator(g, OperatorKind::LSym);
    Vec x(i64(g.n_nodes));
    for (u64 v = 0; v < g.n_nodes; ++v) x[i64(v)] = std::sqrt(double(g.degree(v)));
    Vec y = apply(op, x);
    CHECK(y.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("apply: dimension mismatch and bad gamma are rejected") {
  Graph g = make_path(3);
  auto op = make_operator(g, OperatorKind::SAug);
  Vec x = Vec::Ones(2);
  Vec y = Vec::Zero(3);
  CHECK_THROWS_AS(apply(op, x, y), input_error);
  CHECK_THROWS_AS(make_operator(g, OperatorKind::SAug, 0.0), input_error);
  CHECK_THROWS_AS(make_operator(g, OperatorKind::SAug, -1.0), input_error);
}

TEST_CASE("densify agrees with the independent entrywise construction") {
  Graph g = random_connected(25, 0.15, 3);
  auto aug = make_operator(g, OperatorKind::SAug, 0.7);
  CHECK((densify(aug) - dense_saug(g, 0.7)).cwiseAbs().maxCoeff() < 1e-15);
  auto adj = make_operator(g, OperatorKind::SAdj);
  CHECK((densify(adj) - dense_sadj(g)).cwiseAbs().maxCoeff() < 1e-15);
  auto lap = make_operator(g, OperatorKind::LSym);
  Mat expect = Mat::Identity(25, 25) - dense_sadj(g);
  CHECK((densify(lap) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("bound_lambda: published triples and domain errors") {
  CHECK(std::abs(bound_lambda(15, 121) - 0.4741) < 5e-4);
  CHECK(std::abs(bound_lambda(168, 19) - 0.0324) < 5e-4);
  CHECK(std::abs(bound_lambda(13000, 25) - (-0.0640)) < 5e-4);
  CHECK_THROWS_AS(bound_lambda(15, 3), input_error);
  CHECK_THROWS_AS(bound_lambda(1, 10), input_error);
}

TEST_CASE("bound_lambda: decreasing in d_max, increasing in diam") {
  for (u64 d = 2; d < 40; ++d)
    CHECK(bound_lambda(d + 1, 50) < bound_lambda(d, 50));
  for (u64 diam = 4; diam < 60; ++diam)
    CHECK(bound_lambda(10, diam + 1) > bound_lambda(10, diam));
}

TEST_CASE("principal_eigenvector: closed form residual is tiny") {
  Graph g = random_connected(40, 0.08, 5);
  auto op = make_operator(g, OperatorKind::SAug, 1.0);
  Vec u = principal_eigenvector(op);
  CHECK(std::abs(u.norm() - 1.0) < 1e-14);
  CHECK((apply(op, u) - u).norm() < 1e-13);
  // entries proportional to sqrt(1 + deg)
  const double ratio = u[0] / std::sqrt(1.0 + double(g.degree(0)));
  for (u64 v = 0; v < g.n_nodes; ++v)
    CHECK(u[i64(v)] == doctest::Approx(ratio * std::sqrt(1.0 + double(g.degree(v))))
                           .epsilon(1e-12));

  auto lap = make_operator(g, OperatorKind::LSym);
  CHECK_THROWS_AS(principal_eigenvector(lap), input_error);
}

TEST_CASE("top_eigs: rank-1 two-node case") {
  Graph g = make_path(2);
  auto op = make_operator(g, OperatorKind::SAug, 1.0);
  auto eigs = top_eigs(op, 2);
  REQUIRE(eigs.size() == 2);
  CHECK(eigs[0].value == 1.0);  // closed-form principal value
  CHECK(eigs[0].converged);
  CHECK(std::abs(eigs[1].value) < 1e-10);
  CHECK(eigs[1].converged);
}

TEST_CASE("top_eigs: 4-cycle normalized adjacency top pair {1, 0}") {
  Graph g = make_cycle(4);
  auto op = make_operator(g, OperatorKind::SAdj);
  auto eigs = top_eigs(op, 2);
  REQUIRE(eigs.size() == 2);
  CHECK(eigs[0].value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(eigs[1].value) < 1e-8);
  CHECK(eigs[0].converged);
  CHECK(eigs[1].converged);
  CHECK(eigs[0].residual <= 1e-10);
}

TEST_CASE("top_eigs and bottom_eig match the dense oracle on random graphs") {
  for (u64 seed : {7, 8, 9}) {
    Graph g = random_connected(35, 0.1, seed);
    for (auto kind : {OperatorKind::SAdj, OperatorKind::SAug}) {
      auto op = make_operator(g, kind, 1.0);
      auto dense = oracle::dense_eigs(densify(op));
      auto eigs = top_eigs(op, 2, 1e-11);
      REQUIRE(eigs.size() == 2);
      CHECK(eigs[0].value == doctest::Approx(dense.values[34]).epsilon(1e-8));
      CHECK(eigs[1].value == doctest::Approx(dense.values[33]).epsilon(1e-7));
      auto bot = bottom_eig(op, 1e-11);
      CHECK(bot.value == doctest::Approx(dense.values[0]).epsilon(1e-7));
      CHECK(bot.converged);
    }
    // Laplacian bottom eigenvalue of a connected graph is 0
    auto lap = make_operator(g, OperatorKind::LSym);
    auto bot = bottom_eig(lap, 1e-11);
    CHECK(std::abs(bot.value) < 1e-8);
  }
}

TEST_CASE("verify_complementarity: tiny cases and random graphs") {
  // two-node path: S eigs {-1, 1}, Laplacian eigs {0, 2}
  auto r2 = verify_complementarity(make_path(2), 1e-10);
  CHECK(r2.pass);
  CHECK(r2.max_deviation < 1e-12);

  auto r4 = verify_complementarity(make_cycle(4), 1e-10);
  CHECK(r4.pass);

  Rng rng(13);
  for (int rep = 0; rep < 3; ++rep) {
    GraphBuilder b(20);
    for (u64 i = 1; i < 20; ++i) b.add_edge(i, rng.below(i), 1.0);
    for (u64 i = 0; i < 20; ++i)
      for (u64 j = i + 2; j < 20; ++j)
        if (rng.bernoulli(0.3)) b.add_edge(i, j, 1.0);
    auto res = verify_complementarity(b.build(), 1e-10);
    CHECK(res.pass);
    CHECK(res.max_deviation < 1e-10);
  }
}

TEST_CASE("verify_selfloop_shift: strict on paths and cycles, gap shrinks with gamma") {
  auto p3 = verify_selfloop_shift(make_path(3), 1.0, 1e-12);
  CHECK(p3.pass);
  CHECK(p3.lambda_aug > p3.lambda_plain);

  auto c4 = verify_selfloop_shift(make_cycle(4), 1.0, 1e-12);
  CHECK(c4.pass);

  Graph g = random_connected(24, 0.12, 19);
  double prev_gap = -1.0;
  for (double gamma : {1.0, 0.1, 0.01}) {
    auto res = verify_selfloop_shift(g, gamma, 1e-12);
    CHECK(res.pass);
    const double gap = res.lambda_aug - res.lambda_plain;
    CHECK(gap > 0.0);
    if (prev_gap >= 0.0) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("oversmoothing_decay: two-node curve is identically zero") {
  auto curve = oversmoothing_decay(make_path(2), 10);
  REQUIRE(curve.size() == 10);
  for (double c : curve) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("oversmoothing_decay: 8x8 grid follows the eigenvalue power law") {
  Graph g = make_grid(8, 8);
  auto op = make_operator(g, OperatorKind::SAug, 1.0);
  auto dense = oracle::dense_eigs(densify(op));
  const double lam = dense.values[62];  // second largest
  auto curve = oversmoothing_decay(g, 12);
  REQUIRE(curve.size() == 12);
  for (u32 l = 1; l <= 12; ++l) {
    const double expect = std::pow(lam, double(l));
    CHECK(std::abs(curve[l - 1] - expect) / expect < 1e-6);
  }
  // consecutive ratio recovers the eigenvalue itself
  for (u32 l = 0; l + 1 < 12; ++l)
    CHECK(curve[l + 1] / curve[l] == doctest::Approx(lam).epsilon(1e-7));
}

TEST_CASE("layer collapse: powers converge to the rank-1 limit at the decay rate") {
  Graph g = make_grid(8, 8);
  auto op = make_operator(g, OperatorKind::SAug, 1.0);
  Mat s = densify(op);
  Vec u = principal_eigenvector(op);
  Mat limit = u * u.transpose();
  auto dense = oracle::dense_eigs(s);
  const double lam = dense.values[62];

  // dense power by binary exponentiation: S^200
  Mat s200 = Mat::Identity(64, 64);
  {
    Mat base = s;
    int k = 200;
    while (k > 0) {
      if (k & 1) s200 = s200 * base;
      base = base * base;
      k >>= 1;
    }
  }
  auto norm2 = [](const Mat& m) {
    auto e = oracle::dense_eigs(Mat(0.5 * (m + m.transpose())));
    return std::max(std::abs(e.values[0]), std::abs(e.values[e.values.size() - 1]));
  };
  const double dev200 = norm2(s200 - limit);
  CHECK(dev200 == doctest::Approx(std::pow(lam, 200.0)).epsilon(1e-6));

  Mat s400 = s200 * s200;
  const double dev400 = norm2(s400 - limit);
  CHECK(dev400 < 1e-6);
  CHECK(dev400 == doctest::Approx(std::pow(lam, 400.0)).epsilon(1e-5));
}

TEST_CASE("make_spectral_report: coherent fields on a grid") {
  Graph g = make_grid(8, 8);
  SpectralReport r = make_spectral_report(g, 1.0, 10);
  CHECK(r.n_nodes == 64);
  CHECK(r.gamma == 1.0);
  CHECK(r.lambda_N == 1.0);
  CHECK(r.lambda_N_residual < 1e-10);
  CHECK(r.all_converged);
  CHECK(r.d_max == 4);
  CHECK(r.diam_estimate >= 4);
  CHECK(r.bound_valid);
  CHECK(r.bound_value < r.lambda_N_minus_1);
  CHECK(r.lambda_1 < 0.0);
  REQUIRE(r.decay_curve.size() == 10);
  CHECK(r.decay_curve[0] == doctest::Approx(r.lambda_N_minus_1).epsilon(1e-8));

  auto dense = oracle::dense_eigs(densify(make_operator(g, OperatorKind::SAug, 1.0)));
  CHECK(r.lambda_N_minus_1 == doctest::Approx(dense.values[62]).epsilon(1e-9));
  CHECK(r.lambda_1 == doctest::Approx(dense.values[0]).epsilon(1e-7));

  const std::string j = report_json(r);
  CHECK(j.find("lambda_N_minus_1") != std::string::npos);
  CHECK(j.find("decay_curve") != std::string::npos);
}
