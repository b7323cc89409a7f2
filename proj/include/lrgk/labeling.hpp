#pragma once

#include <filesystem>
#include <vector>

#include "lrgk/graph.hpp"

namespace lrgk {

struct EccentricityResult {
  std::vector<double> epsilon_hat;  // max weighted distance inside the H-hop ball
  u32 hop_bound = 16;
  std::vector<int> labels;  // quantile class 0..q-1 per node
};

// Weighted eccentricity restricted to v's H-hop ego subgraph: paths may not
// leave the ball, so the value can exceed the unrestricted graph distance.
double eccentricity_hat(const Graph& g, u64 v, u32 H);

// All nodes (parallel over the process default thread count), then rank
// binning: sort by (epsilon_hat, node id), label = floor(rank * q / n).
EccentricityResult label_all(const Graph& g, u32 H, int q = 10);

// labels.csv: id,epsilon_hat,label
void save_labels(const std::filesystem::path& file, const EccentricityResult& res);
EccentricityResult load_labels(const std::filesystem::path& file);

}  // namespace lrgk
