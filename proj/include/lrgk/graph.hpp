#pragma once

#include <limits>
#include <span>
#include <vector>

#include "lrgk/types.hpp"

namespace lrgk {

inline constexpr u32 kNoHop = std::numeric_limits<u32>::max();
inline constexpr double kInfDist = std::numeric_limits<double>::infinity();

// Immutable undirected weighted graph in CSR layout. Invariants (enforced by
// GraphBuilder): adjacency symmetric with equal weights both ways, neighbor
// lists sorted ascending, no self-loops, weights >= 0, ids dense 0..n-1.
struct Graph {
  u64 n_nodes = 0;
  u64 n_edges = 0;  // undirected edges counted once
  std::vector<u64> offsets;     // n_nodes + 1
  std::vector<u64> neighbors;   // 2 * n_edges
  std::vector<double> weights;  // parallel to neighbors
  bool has_coords = false;
  std::vector<double> lon, lat;  // per node when has_coords

  u64 degree(u64 v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const u64> nbrs(u64 v) const {
    return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
  }
  std::span<const double> nbr_weights(u64 v) const {
    return {weights.data() + offsets[v], weights.data() + offsets[v + 1]};
  }
  bool has_edge(u64 u, u64 v) const;
  double edge_weight(u64 u, u64 v) const;  // kInfDist when absent
};

// Accumulates an edge list, then produces a canonical Graph: parallel and
// antiparallel duplicates merge into one undirected edge with mean weight,
// self-loops are dropped, neighbor lists come out sorted.
class GraphBuilder {
 public:
  explicit GraphBuilder(u64 n_nodes) : n_(n_nodes) {}

  void add_edge(u64 u, u64 v, double w);
  void set_coords(std::vector<double> lon, std::vector<double> lat);
  Graph build();

 private:
  u64 n_;
  std::vector<u64> eu_, ev_;
  std::vector<double> ew_;
  std::vector<double> lon_, lat_;
  bool has_coords_ = false;
};

struct HopShell {
  u64 center = 0;
  u32 h = 0;
  std::vector<u64> members;  // sorted ascending
};

// Unweighted hop distances from source, kNoHop beyond max_h.
std::vector<u32> bfs_hops(const Graph& g, u64 source, u32 max_h);

// Weighted distances over the subgraph induced by `allowed` (size n mask).
// Nodes outside the mask (or unreachable inside it) get kInfDist.
std::vector<double> dijkstra_within(const Graph& g, u64 source,
                                    const std::vector<u8>& allowed);

HopShell hop_shell(const Graph& g, u64 center, u32 h);

// Component id per node, ids dense in discovery order of the lowest member.
std::vector<u64> connected_components(const Graph& g, u64* n_components = nullptr);
bool is_connected(const Graph& g);

// Subgraph induced by `nodes` (must be sorted, unique). Local ids follow the
// order of `nodes`; coords are carried over. Returned graph may be disconnected.
Graph induced_subgraph(const Graph& g, const std::vector<u64>& nodes);

// Largest connected component with densified ids.
// old_ids (optional out) maps new id -> original id, sorted ascending.
Graph largest_component(const Graph& g, std::vector<u64>* old_ids = nullptr);

}  // namespace lrgk
