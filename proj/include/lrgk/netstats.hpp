#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "lrgk/graph.hpp"

namespace lrgk {

struct NetStatsReport {
  u64 n_nodes = 0, n_edges = 0;
  double avg_degree = 0, std_degree = 0;
  u64 max_degree = 0;
  double avg_clustering = 0, transitivity = 0;
  u64 diameter_estimate = 0;
  bool has_homophily = false;
  double node_homophily = 0;
};

// (mean, population std, max) of the degree sequence.
std::tuple<double, double, u64> degree_stats(const Graph& g);

// (average local clustering, transitivity). C_v = 2 T_v / (deg (deg-1)),
// deg < 2 contributes 0; transitivity = 3 * triangles / connected triples.
std::pair<double, double> clustering(const Graph& g);

// Unweighted lower-bound diameter: max BFS distance between the lat-extremal
// pair and the lon-extremal pair (ties to the smaller id). Without
// coordinates, a double BFS sweep from node 0.
u64 diameter_estimate(const Graph& g);

// Mean over nodes of the fraction of neighbors sharing the node's label.
double node_homophily(const Graph& g, const std::vector<int>& labels);

NetStatsReport full_report(const Graph& g, const std::vector<int>* labels);

// stats.json payload.
std::string report_json(const NetStatsReport& r);

// One Table-style text row for terminal output.
std::string report_row(const NetStatsReport& r);

}  // namespace lrgk
