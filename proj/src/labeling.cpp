#include "lrgk/labeling.hpp"

#include <algorithm>
#include <charconv>

#include "lrgk/errors.hpp"
#include "lrgk/io.hpp"
#include "lrgk/parallel.hpp"

namespace lrgk {

double eccentricity_hat(const Graph& g, u64 v, u32 H) {
  if (H < 1) throw input_error("eccentricity_hat: H must be >= 1");
  const auto hop = bfs_hops(g, v, H);
  std::vector<u8> allowed(g.n_nodes, 0);
  for (u64 u = 0; u < g.n_nodes; ++u)
    if (hop[u] != kNoHop) allowed[u] = 1;
  const auto dist = dijkstra_within(g, v, allowed);
  double ecc = 0.0;
  for (u64 u = 0; u < g.n_nodes; ++u)
    if (dist[u] != kInfDist && dist[u] > ecc) ecc = dist[u];
  return ecc;
}

EccentricityResult label_all(const Graph& g, u32 H, int q) {
  if (q < 2) throw input_error("label_all: q must be >= 2");
  const u64 n = g.n_nodes;
  EccentricityResult res;
  res.hop_bound = H;
  res.epsilon_hat.assign(n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t v = b; v < e; ++v)
      res.epsilon_hat[v] = eccentricity_hat(g, v, H);
  });

  std::vector<u64> order(n);
  for (u64 i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](u64 a, u64 b) {
    if (res.epsilon_hat[a] != res.epsilon_hat[b])
      return res.epsilon_hat[a] < res.epsilon_hat[b];
    return a < b;
  });
  res.labels.assign(n, 0);
  for (u64 rank = 0; rank < n; ++rank)
    res.labels[order[rank]] =
        static_cast<int>(rank * static_cast<u64>(q) / n);
  return res;
}

void save_labels(const std::filesystem::path& file, const EccentricityResult& res) {
  std::vector<CsvRow> rows = {{"id", "epsilon_hat", "label"}};
  for (u64 v = 0; v < res.labels.size(); ++v)
    rows.push_back({std::to_string(v), fmt_double(res.epsilon_hat[v]),
                    std::to_string(res.labels[v])});
  write_csv(file, rows);
}

EccentricityResult load_labels(const std::filesystem::path& file) {
  const auto rows = read_csv(file);
  if (rows.empty() || rows[0] != CsvRow{"id", "epsilon_hat", "label"})
    throw input_error(file.string() + ": bad labels header");
  EccentricityResult res;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto ctx = file.string() + ":" + std::to_string(r + 1);
    if (row.size() != 3) throw input_error(ctx + ": wrong field count");
    u64 id = 0;
    {
      const char* b = row[0].data();
      auto rc = std::from_chars(b, b + row[0].size(), id);
      if (rc.ec != std::errc{} || id != r - 1)
        throw input_error(ctx + ": ids must be dense ascending");
    }
    double eps = 0;
    {
      const char* b = row[1].data();
      auto rc = std::from_chars(b, b + row[1].size(), eps);
      if (rc.ec != std::errc{}) throw input_error(ctx + ": bad epsilon_hat");
    }
    int label = 0;
    {
      const char* b = row[2].data();
      auto rc = std::from_chars(b, b + row[2].size(), label);
      if (rc.ec != std::errc{}) throw input_error(ctx + ": bad label");
    }
    res.epsilon_hat.push_back(eps);
    res.labels.push_back(label);
  }
  return res;
}

}  // namespace lrgk
