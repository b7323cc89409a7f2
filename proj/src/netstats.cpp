#include "lrgk/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/parallel.hpp"

namespace lrgk {

std::tuple<double, double, u64> degree_stats(const Graph& g) {
  if (g.n_nodes == 0) return {0.0, 0.0, 0};
  double sum = 0;
  u64 dmax = 0;
  for (u64 v = 0; v < g.n_nodes; ++v) {
    const u64 d = g.degree(v);
    sum += static_cast<double>(d);
    dmax = std::max(dmax, d);
  }
  const double mean = sum / static_cast<double>(g.n_nodes);
  double ss = 0;
  for (u64 v = 0; v < g.n_nodes; ++v) {
    const double d = static_cast<double>(g.degree(v)) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(g.n_nodes)), dmax};
}

std::pair<double, double> clustering(const Graph& g) {
  const u64 n = g.n_nodes;
  if (n == 0) return {0.0, 0.0};
  std::vector<double> cv(n, 0.0);
  std::vector<double> tv(n, 0.0);  // triangles through v
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t v = b; v < e; ++v) {
      const auto row = g.nbrs(v);
      u64 tri = 0;
      // Count edges among neighbors via sorted-list intersections.
      for (u64 i = 0; i < row.size(); ++i) {
        const auto nb = g.nbrs(row[i]);
        u64 a = i + 1, bj = 0;
        while (a < row.size() && bj < nb.size()) {
          if (row[a] == nb[bj]) {
            ++tri;
            ++a;
            ++bj;
          } else if (row[a] < nb[bj]) {
            ++a;
          } else {
            ++bj;
          }
        }
      }
      tv[v] = static_cast<double>(tri);
      const double deg = static_cast<double>(row.size());
      cv[v] = deg >= 2 ? 2.0 * tv[v] / (deg * (deg - 1.0)) : 0.0;
    }
  });
  double cbar = 0, triangles3 = 0, triples = 0;
  for (u64 v = 0; v < n; ++v) {
    cbar += cv[v];
    triangles3 += tv[v];  // each triangle counted once per corner = 3x total
    const double deg = static_cast<double>(g.degree(v));
    triples += deg * (deg - 1.0) / 2.0;
  }
  cbar /= static_cast<double>(n);
  const double trans = triples > 0 ? triangles3 / triples : 0.0;
  return {cbar, trans};
}

namespace {

u64 bfs_dist(const Graph& g, u64 a, u64 b) {
  const auto hop = bfs_hops(g, a, kNoHop - 1);
  if (hop[b] == kNoHop) throw input_error("diameter_estimate: disconnected pair");
  return hop[b];
}

// Farthest node from s by hops, ties to the smaller id.
std::pair<u64, u64> farthest(const Graph& g, u64 s) {
  const auto hop = bfs_hops(g, s, kNoHop - 1);
  u64 best = s, bh = 0;
  for (u64 v = 0; v < g.n_nodes; ++v)
    if (hop[v] != kNoHop && hop[v] > bh) {
      bh = hop[v];
      best = v;
    }
  return {best, bh};
}

}  // namespace

u64 diameter_estimate(const Graph& g) {
  if (g.n_nodes == 0) throw input_error("diameter_estimate: empty graph");
  if (!g.has_coords) {
    const auto [far1, h1] = farthest(g, 0);
    const auto [far2, h2] = farthest(g, far1);
    (void)far2;
    return h2;
  }
  u64 lon_min = 0, lon_max = 0, lat_min = 0, lat_max = 0;
  for (u64 v = 1; v < g.n_nodes; ++v) {
    if (g.lon[v] < g.lon[lon_min]) lon_min = v;
    if (g.lon[v] > g.lon[lon_max]) lon_max = v;
    if (g.lat[v] < g.lat[lat_min]) lat_min = v;
    if (g.lat[v] > g.lat[lat_max]) lat_max = v;
  }
  const u64 d_lat = bfs_dist(g, lat_min, lat_max);
  const u64 d_lon = bfs_dist(g, lon_min, lon_max);
  return std::max(d_lat, d_lon);
}

double node_homophily(const Graph& g, const std::vector<int>& labels) {
  if (labels.size() != g.n_nodes)
    throw input_error("node_homophily: label count mismatch");
  if (g.n_nodes == 0) return 0.0;
  double acc = 0;
  for (u64 v = 0; v < g.n_nodes; ++v) {
    const auto row = g.nbrs(v);
    if (row.empty()) continue;
    u64 same = 0;
    for (u64 u : row)
      if (labels[u] == labels[v]) ++same;
    acc += static_cast<double>(same) / static_cast<double>(row.size());
  }
  return acc / static_cast<double>(g.n_nodes);
}

NetStatsReport full_report(const Graph& g, const std::vector<int>* labels) {
  NetStatsReport r;
  r.n_nodes = g.n_nodes;
  r.n_edges = g.n_edges;
  std::tie(r.avg_degree, r.std_degree, r.max_degree) = degree_stats(g);
  std::tie(r.avg_clustering, r.transitivity) = clustering(g);
  r.diameter_estimate = diameter_estimate(g);
  if (labels) {
    r.node_homophily = node_homophily(g, *labels);
    r.has_homophily = true;
  }
  return r;
}

std::string report_json(const NetStatsReport& r) {
  nlohmann::json j;
  j["n_nodes"] = r.n_nodes;
  j["n_edges"] = r.n_edges;
  j["avg_degree"] = r.avg_degree;
  j["std_degree"] = r.std_degree;
  j["max_degree"] = r.max_degree;
  j["avg_clustering"] = r.avg_clustering;
  j["transitivity"] = r.transitivity;
  j["diameter_estimate"] = r.diameter_estimate;
  if (r.has_homophily) j["node_homophily"] = r.node_homophily;
  else j["node_homophily"] = nullptr;
  return j.dump(2);
}

std::string report_row(const NetStatsReport& r) {
  std::ostringstream os;
  os << "|V|=" << r.n_nodes << " |E|=" << r.n_edges << " mu_k=" << r.avg_degree
     << " sigma_k=" << r.std_degree << " d_max=" << r.max_degree
     << " C_avg=" << r.avg_clustering << " trans=" << r.transitivity
     << " D_hat=" << r.diameter_estimate;
  if (r.has_homophily) os << " homophily=" << r.node_homophily;
  return os.str();
}

}  // namespace lrgk
