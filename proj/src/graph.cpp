#include "lrgk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>

#include "lrgk/errors.hpp"

namespace lrgk {

bool Graph::has_edge(u64 u, u64 v) const {
  const auto row = nbrs(u);
  return std::binary_search(row.begin(), row.end(), v);
}

double Graph::edge_weight(u64 u, u64 v) const {
  const auto row = nbrs(u);
  const auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return kInfDist;
  return weights[offsets[u] + static_cast<u64>(it - row.begin())];
}

void GraphBuilder::add_edge(u64 u, u64 v, double w) {
  if (u >= n_ || v >= n_) throw input_error("edge endpoint out of range");
  // !(w >= 0) also catches NaN
  if (!(w >= 0.0) || !std::isfinite(w))
    throw input_error("edge weight must be finite and non-negative");
  if (u == v) return;  // self-loops never stored
  eu_.push_back(std::min(u, v));
  ev_.push_back(std::max(u, v));
  ew_.push_back(w);
}

void GraphBuilder::set_coords(std::vector<double> lon, std::vector<double> lat) {
  if (lon.size() != n_ || lat.size() != n_)
    throw input_error("coordinate arrays must have one entry per node");
  lon_ = std::move(lon);
  lat_ = std::move(lat);
  has_coords_ = true;
}

Graph GraphBuilder::build() {
  // Sort (u, v) pairs, then mean-merge runs of duplicates.
  std::vector<u64> order(eu_.size());
  std::iota(order.begin(), order.end(), u64{0});
  std::sort(order.begin(), order.end(), [&](u64 a, u64 b) {
    if (eu_[a] != eu_[b]) return eu_[a] < eu_[b];
    return ev_[a] < ev_[b];
  });

  std::vector<u64> mu, mv;
  std::vector<double> mw;
  for (u64 i = 0; i < order.size();) {
    u64 j = i;
    double sum = 0.0;
    while (j < order.size() && eu_[order[j]] == eu_[order[i]] &&
           ev_[order[j]] == ev_[order[i]]) {
      sum += ew_[order[j]];
      ++j;
    }
    mu.push_back(eu_[order[i]]);
    mv.push_back(ev_[order[i]]);
    mw.push_back(sum / static_cast<double>(j - i));
    i = j;
  }

  Graph g;
  g.n_nodes = n_;
  g.n_edges = mu.size();
  g.offsets.assign(n_ + 1, 0);
  for (u64 e = 0; e < mu.size(); ++e) {
    ++g.offsets[mu[e] + 1];
    ++g.offsets[mv[e] + 1];
  }
  for (u64 v = 0; v < n_; ++v) g.offsets[v + 1] += g.offsets[v];
  g.neighbors.resize(2 * g.n_edges);
  g.weights.resize(2 * g.n_edges);
  std::vector<u64> cursor(g.offsets.begin(), g.offsets.end() - 1);
  // Edges are visited in (u, v) sorted order, so each row fills ascending:
  // row u sees increasing v, and row v sees increasing u across the sweep.
  for (u64 e = 0; e < mu.size(); ++e) {
    g.neighbors[cursor[mu[e]]] = mv[e];
    g.weights[cursor[mu[e]]++] = mw[e];
  }
  for (u64 e = 0; e < mu.size(); ++e) {
    g.neighbors[cursor[mv[e]]] = mu[e];
    g.weights[cursor[mv[e]]++] = mw[e];
  }
  for (u64 v = 0; v < n_; ++v) {
    const auto b = g.neighbors.begin() + static_cast<i64>(g.offsets[v]);
    const auto e = g.neighbors.begin() + static_cast<i64>(g.offsets[v + 1]);
    if (!std::is_sorted(b, e)) {
      // Mixed lower/upper fills can interleave; restore row order.
      std::vector<std::pair<u64, double>> row;
      row.reserve(static_cast<size_t>(e - b));
      for (u64 k = g.offsets[v]; k < g.offsets[v + 1]; ++k)
        row.emplace_back(g.neighbors[k], g.weights[k]);
      std::sort(row.begin(), row.end());
      for (u64 k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
        g.neighbors[k] = row[k - g.offsets[v]].first;
        g.weights[k] = row[k - g.offsets[v]].second;
      }
    }
  }
  if (has_coords_) {
    g.has_coords = true;
    g.lon = lon_;
    g.lat = lat_;
  }
  return g;
}

std::vector<u32> bfs_hops(const Graph& g, u64 source, u32 max_h) {
  if (source >= g.n_nodes) throw input_error("bfs_hops: source out of range");
  std::vector<u32> hop(g.n_nodes, kNoHop);
  hop[source] = 0;
  std::vector<u64> frontier{source}, next;
  for (u32 h = 0; h < max_h && !frontier.empty(); ++h) {
    next.clear();
    for (u64 v : frontier) {
      for (u64 u : g.nbrs(v)) {
        if (hop[u] == kNoHop) {
          hop[u] = h + 1;
          next.push_back(u);
        }
      }
    }
    frontier.swap(next);
  }
  return hop;
}

std::vector<double> dijkstra_within(const Graph& g, u64 source,
                                    const std::vector<u8>& allowed) {
  if (source >= g.n_nodes) throw input_error("dijkstra_within: source out of range");
  if (allowed.size() != g.n_nodes)
    throw input_error("dijkstra_within: mask size mismatch");
  if (!allowed[source]) throw input_error("dijkstra_within: source not in allowed set");
  for (double w : g.weights)
    if (w < 0.0) throw input_error("dijkstra_within: negative weight");

  std::vector<double> dist(g.n_nodes, kInfDist);
  std::vector<u8> settled(g.n_nodes, 0);
  dist[source] = 0.0;
  using Item = std::pair<double, u64>;  // (dist, id): id breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    const auto row = g.nbrs(v);
    const auto w = g.nbr_weights(v);
    for (u64 k = 0; k < row.size(); ++k) {
      const u64 u = row[k];
      if (!allowed[u] || settled[u]) continue;
      const double nd = d + w[k];
      if (nd < dist[u]) {
        dist[u] = nd;
        pq.emplace(nd, u);
      }
    }
  }
  return dist;
}

HopShell hop_shell(const Graph& g, u64 center, u32 h) {
  if (center >= g.n_nodes) throw input_error("hop_shell: center out of range");
  const auto hop = bfs_hops(g, center, h);
  HopShell shell;
  shell.center = center;
  shell.h = h;
  for (u64 v = 0; v < g.n_nodes; ++v)
    if (hop[v] == h) shell.members.push_back(v);
  return shell;
}

std::vector<u64> connected_components(const Graph& g, u64* n_components) {
  std::vector<u64> comp(g.n_nodes, kNoHop);
  u64 next_id = 0;
  std::vector<u64> stack;
  for (u64 s = 0; s < g.n_nodes; ++s) {
    if (comp[s] != kNoHop) continue;
    comp[s] = next_id;
    stack.push_back(s);
    while (!stack.empty()) {
      const u64 v = stack.back();
      stack.pop_back();
      for (u64 u : g.nbrs(v)) {
        if (comp[u] == kNoHop) {
          comp[u] = next_id;
          stack.push_back(u);
        }
      }
    }
    ++next_id;
  }
  if (n_components) *n_components = next_id;
  return comp;
}

bool is_connected(const Graph& g) {
  if (g.n_nodes == 0) return false;
  u64 nc = 0;
  connected_components(g, &nc);
  return nc == 1;
}

Graph induced_subgraph(const Graph& g, const std::vector<u64>& nodes) {
  std::vector<u64> local(g.n_nodes, kNoHop);
  for (u64 i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.n_nodes) throw input_error("induced_subgraph: node out of range");
    if (i > 0 && nodes[i] <= nodes[i - 1])
      throw input_error("induced_subgraph: nodes must be sorted unique");
    local[nodes[i]] = i;
  }
  GraphBuilder b(nodes.size());
  for (u64 i = 0; i < nodes.size(); ++i) {
    const u64 v = nodes[i];
    const auto row = g.nbrs(v);
    const auto w = g.nbr_weights(v);
    for (u64 k = 0; k < row.size(); ++k) {
      const u64 u = row[k];
      if (u > v && local[u] != kNoHop) b.add_edge(i, local[u], w[k]);
    }
  }
  if (g.has_coords) {
    std::vector<double> lon(nodes.size()), lat(nodes.size());
    for (u64 i = 0; i < nodes.size(); ++i) {
      lon[i] = g.lon[nodes[i]];
      lat[i] = g.lat[nodes[i]];
    }
    b.set_coords(std::move(lon), std::move(lat));
  }
  return b.build();
}

Graph largest_component(const Graph& g, std::vector<u64>* old_ids) {
  u64 nc = 0;
  const auto comp = connected_components(g, &nc);
  if (nc == 0) throw input_error("largest_component: empty graph");
  std::vector<u64> size(nc, 0);
  for (u64 v = 0; v < g.n_nodes; ++v) ++size[comp[v]];
  u64 best = 0;
  for (u64 c = 1; c < nc; ++c)
    if (size[c] > size[best]) best = c;  // ties keep the lower component id
  std::vector<u64> keep;
  keep.reserve(size[best]);
  for (u64 v = 0; v < g.n_nodes; ++v)
    if (comp[v] == best) keep.push_back(v);
  Graph sub = induced_subgraph(g, keep);
  if (old_ids) *old_ids = keep;
  return sub;
}

}  // namespace lrgk
