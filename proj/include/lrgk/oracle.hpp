#pragma once
// Brute-force reference implementations used only by tests. Deliberately
// simple and slow, with hard size caps; they share no algorithm code with
// the library targets they check.

#include <functional>
#include <string>
#include <vector>

#include "lrgk/graph.hpp"
#include "lrgk/types.hpp"

namespace lrgk::oracle {

// Per-node eccentricity by repeated array-scan shortest paths (weighted) or
// plain breadth-first search (hops). Unreachable nodes are ignored, so the
// value is the maximum over the node's component. n <= 1000.
std::vector<double> exact_eccentricity(const Graph& g, bool weighted);

// Hop diameter by all-pairs breadth-first search; rejects disconnected
// graphs. n <= 2000.
u64 exact_diameter(const Graph& g);

struct DenseEigs {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns matching values
};
DenseEigs dense_eigs(const Mat& m, double tol = 1e-9);

// Central-difference Jacobian of a seed-logit map: eval(X) returns the
// logits row of one fixed seed. Column u * n_feats + j of the result
// differentiates against input entry (u, j).
Mat finite_diff_jacobian(const std::function<Vec(const Mat&)>& eval, Mat X,
                         double step = 1e-5);

}  // namespace lrgk::oracle
