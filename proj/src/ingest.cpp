#include "lrgk/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lrgk/errors.hpp"
#include "lrgk/io.hpp"
#include "lrgk/labeling.hpp"

namespace lrgk {

namespace {

using nlohmann::json;

double parse_double(const std::string& s, const std::string& ctx) {
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw input_error(ctx + ": bad number '" + s + "'");
  return v;
}

u64 parse_u64(const std::string& s, const std::string& ctx) {
  u64 v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw input_error(ctx + ": bad integer '" + s + "'");
  return v;
}

std::string line_ctx(const std::filesystem::path& file, std::size_t row) {
  // +1 for the header row; rows are 0-based data indices.
  return file.string() + ":" + std::to_string(row + 2);
}

void expect_header(const CsvRow& got, const std::vector<std::string>& want,
                   const std::filesystem::path& file) {
  if (got.size() != want.size() ||
      !std::equal(got.begin(), got.end(), want.begin()))
    throw input_error(file.string() + ": unexpected header");
}

// Top-8 categories by frequency, ties to the lexicographically smaller name.
// Empty strings never rank; they always fall into the implicit "other".
CategoricalSchema top_categories(const std::string& name,
                                 const std::map<std::string, u64>& counts) {
  std::vector<std::pair<std::string, u64>> ranked;
  for (const auto& [cat, cnt] : counts)
    if (!cat.empty()) ranked.emplace_back(cat, cnt);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > 8) ranked.resize(8);
  CategoricalSchema cs;
  cs.name = name;
  for (auto& [cat, cnt] : ranked) cs.kept.push_back(std::move(cat));
  return cs;
}

// Column index within a one-hot group (kept.size() == "other").
u64 onehot_index(const CategoricalSchema& cs, const std::string& value) {
  if (!value.empty())
    for (u64 i = 0; i < cs.kept.size(); ++i)
      if (cs.kept[i] == value) return i;
  return cs.kept.size();
}

NumericStat population_stat(const std::string& name, const std::vector<double>& xs) {
  NumericStat st;
  st.name = name;
  if (xs.empty()) return st;
  double sum = 0;
  for (double x : xs) sum += x;
  st.mean = sum / static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - st.mean) * (x - st.mean);
  st.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return st;
}

// Per-node means of raw edge length/speed, used for schema stats and encoding.
void aggregate_edge_numerics(const RawCityRecord& raw, u64 n,
                             std::vector<double>& len_mean,
                             std::vector<double>& spd_mean) {
  len_mean.assign(n, 0.0);
  spd_mean.assign(n, 0.0);
  std::vector<u64> cnt(n, 0);
  for (const auto& e : raw.edges) {
    len_mean[e.u] += e.length;
    len_mean[e.v] += e.length;
    spd_mean[e.u] += e.speed;
    spd_mean[e.v] += e.speed;
    ++cnt[e.u];
    ++cnt[e.v];
  }
  for (u64 v = 0; v < n; ++v) {
    if (cnt[v]) {
      len_mean[v] /= static_cast<double>(cnt[v]);
      spd_mean[v] /= static_cast<double>(cnt[v]);
    }
  }
}

constexpr const char* kLandUses[8] = {"residential", "commercial", "industrial",
                                      "retail",      "forest",     "park",
                                      "farmland",    "meadow"};
constexpr const char* kRoadTypes[8] = {"motorway",    "trunk",   "primary",
                                       "secondary",   "tertiary", "residential",
                                       "service",     "unclassified"};
constexpr double kTypeFactor[8] = {4.0, 3.0, 2.0, 1.5, 1.25, 1.0, 0.5, 0.75};
constexpr double kTypeSpeed[8] = {110, 90, 70, 60, 50, 30, 20, 40};
constexpr const char* kLanes[7] = {"1", "2", "3", "4", "[1, 2]", "[2, 3]", "[3, 4]"};
constexpr u64 kBlock = 8;  // spatial block edge, in nodes

}  // namespace

u64 EncodingSchema::width() const {
  u64 w = 3 + land_use.kept.size() + 1;  // lon, lat, street_count, onehot
  w += 2;                                // edge length/speed means
  for (const auto& c : edge_cats) w += c.kept.size() + 1;
  return w;
}

std::vector<std::string> EncodingSchema::feature_names() const {
  std::vector<std::string> names = {"lon", "lat", "street_count"};
  auto emit = [&names](const CategoricalSchema& cs) {
    for (const auto& cat : cs.kept) names.push_back(cs.name + "=" + cat);
    names.push_back(cs.name + "=other");
  };
  emit(land_use);
  names.push_back("edge_length_mean");
  names.push_back("edge_speed_mean");
  for (const auto& cs : edge_cats) emit(cs);
  return names;
}

std::pair<Graph, RawCityRecord> load_city(const std::filesystem::path& nodes_file,
                                          const std::filesystem::path& edges_file) {
  const auto node_rows = read_csv(nodes_file);
  const auto edge_rows = read_csv(edges_file);
  if (node_rows.empty()) throw input_error(nodes_file.string() + ": empty file");
  if (edge_rows.empty()) throw input_error(edges_file.string() + ": empty file");
  expect_header(node_rows[0], {"id", "lon", "lat", "street_count", "land_use"},
                nodes_file);
  expect_header(edge_rows[0],
                {"u", "v", "length", "speed", "one_way", "reversed", "lanes",
                 "road_type"},
                edges_file);

  RawCityRecord raw;
  std::unordered_map<u64, u64> dense;  // file id -> dense id in file order
  for (std::size_t r = 1; r < node_rows.size(); ++r) {
    const auto& row = node_rows[r];
    const auto ctx = line_ctx(nodes_file, r - 1);
    if (row.size() != 5) throw input_error(ctx + ": expected 5 fields");
    RawNode n;
    n.id = parse_u64(row[0], ctx);
    n.lon = parse_double(row[1], ctx);
    n.lat = parse_double(row[2], ctx);
    n.street_count = parse_double(row[3], ctx);
    n.land_use = row[4];
    if (!dense.emplace(n.id, raw.nodes.size()).second)
      throw input_error(ctx + ": duplicate node id " + row[0]);
    n.id = raw.nodes.size();
    raw.nodes.push_back(std::move(n));
  }
  for (std::size_t r = 1; r < edge_rows.size(); ++r) {
    const auto& row = edge_rows[r];
    const auto ctx = line_ctx(edges_file, r - 1);
    if (row.size() != 8) throw input_error(ctx + ": expected 8 fields");
    RawEdge e;
    const u64 fu = parse_u64(row[0], ctx);
    const u64 fv = parse_u64(row[1], ctx);
    const auto iu = dense.find(fu);
    const auto iv = dense.find(fv);
    if (iu == dense.end()) throw input_error(ctx + ": unknown node id " + row[0]);
    if (iv == dense.end()) throw input_error(ctx + ": unknown node id " + row[1]);
    e.u = iu->second;
    e.v = iv->second;
    e.length = parse_double(row[2], ctx);
    if (!(e.length > 0)) throw input_error(ctx + ": length must be > 0");
    e.speed = parse_double(row[3], ctx);
    e.one_way = row[4];
    e.reversed = row[5];
    e.lanes = row[6];
    e.road_type = row[7];
    if (e.u == e.v) continue;  // self-loop roads carry no graph information
    raw.edges.push_back(std::move(e));
  }

  GraphBuilder b(raw.nodes.size());
  for (const auto& e : raw.edges) b.add_edge(e.u, e.v, e.length);
  {
    std::vector<double> lon(raw.nodes.size()), lat(raw.nodes.size());
    for (u64 i = 0; i < raw.nodes.size(); ++i) {
      lon[i] = raw.nodes[i].lon;
      lat[i] = raw.nodes[i].lat;
    }
    b.set_coords(std::move(lon), std::move(lat));
  }
  Graph merged = b.build();
  if (merged.n_edges == 0)
    throw input_error(edges_file.string() + ": graph has no usable edges");

  std::vector<u64> keep;
  Graph g = largest_component(merged, &keep);

  // Remap the raw record onto the surviving component.
  std::vector<u64> remap(merged.n_nodes, kNoHop);
  for (u64 i = 0; i < keep.size(); ++i) remap[keep[i]] = i;
  RawCityRecord out;
  out.nodes.reserve(keep.size());
  for (u64 i = 0; i < keep.size(); ++i) {
    RawNode n = raw.nodes[keep[i]];
    n.id = i;
    out.nodes.push_back(std::move(n));
  }
  for (const auto& e : raw.edges) {
    if (remap[e.u] == kNoHop || remap[e.v] == kNoHop) continue;
    RawEdge m = e;
    m.u = remap[e.u];
    m.v = remap[e.v];
    out.edges.push_back(std::move(m));
  }
  return {std::move(g), std::move(out)};
}

EncodingSchema build_schema(const RawCityRecord& raw) {
  if (raw.nodes.empty()) throw input_error("build_schema: no node records");
  EncodingSchema schema;

  std::map<std::string, u64> lu;
  for (const auto& n : raw.nodes) ++lu[n.land_use];
  schema.land_use = top_categories("land_use", lu);

  std::map<std::string, u64> ow, rv, ln, rt;
  for (const auto& e : raw.edges) {
    ++ow[e.one_way];
    ++rv[e.reversed];
    ++ln[e.lanes];
    ++rt[e.road_type];
  }
  schema.edge_cats = {top_categories("one_way", ow), top_categories("reversed", rv),
                      top_categories("lanes", ln), top_categories("road_type", rt)};

  const u64 n = raw.nodes.size();
  std::vector<double> lon(n), lat(n), sc(n), len, spd;
  for (u64 i = 0; i < n; ++i) {
    lon[i] = raw.nodes[i].lon;
    lat[i] = raw.nodes[i].lat;
    sc[i] = raw.nodes[i].street_count;
  }
  aggregate_edge_numerics(raw, n, len, spd);
  schema.numeric = {population_stat("lon", lon), population_stat("lat", lat),
                    population_stat("street_count", sc),
                    population_stat("edge_length_mean", len),
                    population_stat("edge_speed_mean", spd)};
  return schema;
}

FeatureTable encode_features(const Graph& g, const RawCityRecord& raw,
                             const EncodingSchema& schema) {
  const u64 n = g.n_nodes;
  if (raw.nodes.size() != n)
    throw input_error("encode_features: record/graph node count mismatch");
  FeatureTable ft;
  ft.feature_names = schema.feature_names();
  const u64 d = schema.width();
  ft.X = Mat::Zero(static_cast<i64>(n), static_cast<i64>(d));

  auto standardize = [](double x, const NumericStat& st) {
    return st.std > 0 ? (x - st.mean) / st.std : 0.0;
  };

  std::vector<double> len_mean, spd_mean;
  aggregate_edge_numerics(raw, n, len_mean, spd_mean);

  const u64 lu_cols = schema.land_use.kept.size() + 1;
  const u64 edge_base = 3 + lu_cols;

  for (u64 v = 0; v < n; ++v) {
    const auto& node = raw.nodes[v];
    ft.X(v, 0) = standardize(node.lon, schema.numeric[0]);
    ft.X(v, 1) = standardize(node.lat, schema.numeric[1]);
    ft.X(v, 2) = standardize(node.street_count, schema.numeric[2]);
    ft.X(v, 3 + onehot_index(schema.land_use, node.land_use)) = 1.0;
    ft.X(v, edge_base + 0) = standardize(len_mean[v], schema.numeric[3]);
    ft.X(v, edge_base + 1) = standardize(spd_mean[v], schema.numeric[4]);
  }

  // Averaged one-hot edge groups: each incident raw row votes for one column.
  std::vector<u64> cnt(n, 0);
  for (const auto& e : raw.edges) {
    ++cnt[e.u];
    ++cnt[e.v];
  }
  u64 base = edge_base + 2;
  for (u64 c = 0; c < schema.edge_cats.size(); ++c) {
    const auto& cs = schema.edge_cats[c];
    for (const auto& e : raw.edges) {
      const std::string& value = c == 0   ? e.one_way
                                 : c == 1 ? e.reversed
                                 : c == 2 ? e.lanes
                                          : e.road_type;
      const u64 col = base + onehot_index(cs, value);
      if (cnt[e.u]) ft.X(e.u, col) += 1.0 / static_cast<double>(cnt[e.u]);
      if (cnt[e.v]) ft.X(e.v, col) += 1.0 / static_cast<double>(cnt[e.v]);
    }
    base += cs.kept.size() + 1;
  }
  return ft;
}

std::vector<u8> make_split(u64 n_nodes, const std::array<double, 3>& fractions,
                           u64 seed) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw input_error("make_split: fractions must sum to 1");
  std::vector<u64> perm(n_nodes);
  for (u64 i = 0; i < n_nodes; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  u64 n_train = static_cast<u64>(std::llround(fractions[0] * static_cast<double>(n_nodes)));
  u64 n_val = static_cast<u64>(std::llround(fractions[1] * static_cast<double>(n_nodes)));
  n_train = std::min(n_train, n_nodes);
  n_val = std::min(n_val, n_nodes - n_train);
  std::vector<u8> split(n_nodes, kTest);
  for (u64 i = 0; i < n_train; ++i) split[perm[i]] = kTrain;
  for (u64 i = n_train; i < n_train + n_val; ++i) split[perm[i]] = kVal;
  return split;
}

double WeightLaw::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::LogNormal: return rng.lognormal(a, b);
  }
  return a;
}

WeightLaw WeightLaw::parse(const std::string& text) {
  WeightLaw law;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "constant") law.kind = Kind::Constant;
  else if (head == "uniform") law.kind = Kind::Uniform;
  else if (head == "lognormal") law.kind = Kind::LogNormal;
  else throw input_error("unknown weight law '" + head + "'");
  if (!args.empty()) {
    const auto comma = args.find(',');
    if (law.kind == Kind::Constant) {
      if (comma != std::string::npos)
        throw input_error("constant law takes one parameter");
      law.a = parse_double(args, "weight law");
    } else {
      if (comma == std::string::npos)
        throw input_error("weight law needs two parameters");
      law.a = parse_double(args.substr(0, comma), "weight law");
      law.b = parse_double(args.substr(comma + 1), "weight law");
    }
  } else if (law.kind == Kind::LogNormal) {
    law.a = 4.0;
    law.b = 0.25;
  }
  return law;
}

std::string WeightLaw::str() const {
  switch (kind) {
    case Kind::Constant: return "constant:" + fmt_double(a);
    case Kind::Uniform: return "uniform:" + fmt_double(a) + "," + fmt_double(b);
    case Kind::LogNormal: return "lognormal:" + fmt_double(a) + "," + fmt_double(b);
  }
  return "";
}

std::pair<Graph, RawCityRecord> gen_grid_city(u64 width, u64 height,
                                              const WeightLaw& weight_law,
                                              double perturb_p, u64 seed) {
  if (width < 2 || height < 2)
    throw input_error("gen_grid_city: width and height must be >= 2");
  const u64 n = width * height;
  Rng rng(seed);

  const u64 nbx = (width + kBlock - 1) / kBlock;
  const u64 nby = (height + kBlock - 1) / kBlock;
  std::vector<u64> block_lu(nbx * nby), block_rt(nbx * nby);
  for (u64 i = 0; i < nbx * nby; ++i) {
    block_lu[i] = rng.below(8);
    block_rt[i] = rng.below(8);
  }
  auto block_of = [&](u64 v) {
    const u64 r = v / width, c = v % width;
    return (r / kBlock) * nbx + (c / kBlock);
  };

  struct Seg {
    u64 u, v;
    double length, speed;
    u64 one_way, reversed, lanes;
  };
  std::vector<Seg> segs;
  for (u64 r = 0; r < height; ++r) {
    for (u64 c = 0; c < width; ++c) {
      const u64 v = r * width + c;
      auto push = [&](u64 u2) {
        Seg s;
        s.u = v;
        s.v = u2;
        const u64 rt = block_rt[block_of(v)];
        s.length = weight_law.sample(rng) * kTypeFactor[rt];
        s.speed = kTypeSpeed[rt] + rng.uniform(-5.0, 5.0);
        s.one_way = rng.bernoulli(0.3) ? 1 : 0;
        s.reversed = rng.bernoulli(0.5) ? 1 : 0;
        s.lanes = rng.below(7);
        segs.push_back(s);
      };
      if (c + 1 < width) push(v + 1);
      if (r + 1 < height) push(v + width);
    }
  }

  // Tentative deletions that keep the graph connected.
  std::vector<u8> alive(segs.size(), 1);
  if (perturb_p > 0) {
    std::vector<std::vector<u64>> adj(n);
    for (u64 e = 0; e < segs.size(); ++e) {
      adj[segs[e].u].push_back(e);
      adj[segs[e].v].push_back(e);
    }
    std::vector<u64> stack;
    std::vector<u8> seen(n);
    auto connected_without = [&](u64 skip) {
      std::fill(seen.begin(), seen.end(), u8{0});
      stack.assign(1, u64{0});
      seen[0] = 1;
      u64 cnt = 1;
      while (!stack.empty()) {
        const u64 v = stack.back();
        stack.pop_back();
        for (u64 e : adj[v]) {
          if (!alive[e] || e == skip) continue;
          const u64 u = segs[e].u == v ? segs[e].v : segs[e].u;
          if (!seen[u]) {
            seen[u] = 1;
            ++cnt;
            stack.push_back(u);
          }
        }
      }
      return cnt == n;
    };
    for (u64 e = 0; e < segs.size(); ++e) {
      if (!rng.bernoulli(perturb_p)) continue;
      if (connected_without(e)) alive[e] = 0;
    }
  }

  RawCityRecord raw;
  raw.nodes.resize(n);
  for (u64 v = 0; v < n; ++v) {
    raw.nodes[v].id = v;
    raw.nodes[v].lon = static_cast<double>(v % width);
    raw.nodes[v].lat = static_cast<double>(v / width);
    raw.nodes[v].land_use = kLandUses[block_lu[block_of(v)]];
  }
  GraphBuilder b(n);
  for (u64 e = 0; e < segs.size(); ++e) {
    if (!alive[e]) continue;
    const Seg& s = segs[e];
    RawEdge re;
    re.u = s.u;
    re.v = s.v;
    re.length = s.length;
    re.speed = s.speed;
    re.one_way = s.one_way ? "True" : "False";
    re.reversed = s.reversed ? "True" : "False";
    re.lanes = kLanes[s.lanes];
    re.road_type = kRoadTypes[block_rt[block_of(s.u)]];
    raw.edges.push_back(std::move(re));
    b.add_edge(s.u, s.v, s.length);
  }
  {
    std::vector<double> lon(n), lat(n);
    for (u64 v = 0; v < n; ++v) {
      lon[v] = raw.nodes[v].lon;
      lat[v] = raw.nodes[v].lat;
    }
    b.set_coords(std::move(lon), std::move(lat));
  }
  Graph g = b.build();
  for (u64 v = 0; v < n; ++v)
    raw.nodes[v].street_count = static_cast<double>(g.degree(v));
  return {std::move(g), std::move(raw)};
}

Graph gen_small_world(u64 n, u64 k, double rewire_p, u64 seed) {
  if (n < 3) throw input_error("gen_small_world: n must be >= 3");
  if (k == 0 || k % 2 != 0 || k >= n)
    throw input_error("gen_small_world: k must be even and < n");
  for (u64 attempt = 0; attempt < 100; ++attempt) {
    Rng rng(seed + attempt * 0xF4243ULL);
    std::vector<std::set<u64>> adj(n);
    for (u64 i = 0; i < n; ++i) {
      for (u64 j = 1; j <= k / 2; ++j) {
        const u64 t = (i + j) % n;
        adj[i].insert(t);
        adj[t].insert(i);
      }
    }
    for (u64 j = 1; j <= k / 2; ++j) {
      for (u64 i = 0; i < n; ++i) {
        const u64 t = (i + j) % n;
        const bool flip = rng.bernoulli(rewire_p);
        if (!flip || !adj[i].count(t)) continue;
        // Retarget i-t to i-w, avoiding self-loops and duplicate edges.
        u64 w = 0;
        bool found = false;
        for (int tries = 0; tries < 64; ++tries) {
          w = rng.below(n);
          if (w != i && !adj[i].count(w)) {
            found = true;
            break;
          }
        }
        if (!found) continue;
        adj[i].erase(t);
        adj[t].erase(i);
        adj[i].insert(w);
        adj[w].insert(i);
      }
    }
    GraphBuilder b(n);
    for (u64 i = 0; i < n; ++i)
      for (u64 t : adj[i])
        if (t > i) b.add_edge(i, t, 1.0);
    {
      std::vector<double> lon(n), lat(n);
      for (u64 i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        lon[i] = std::cos(th);
        lat[i] = std::sin(th);
      }
      b.set_coords(std::move(lon), std::move(lat));
    }
    Graph g = b.build();
    if (is_connected(g)) return g;
  }
  throw std::runtime_error("gen_small_world: could not produce a connected graph");
}

void save_bundle(const std::filesystem::path& dir, const Graph& g,
                 const FeatureTable& ft, const EncodingSchema* schema) {
  std::filesystem::create_directories(dir);
  save_graph(g, dir / "graph.bin");

  std::vector<CsvRow> rows;
  CsvRow header = {"id"};
  header.insert(header.end(), ft.feature_names.begin(), ft.feature_names.end());
  rows.push_back(std::move(header));
  for (i64 v = 0; v < ft.X.rows(); ++v) {
    CsvRow row = {std::to_string(v)};
    for (i64 c = 0; c < ft.X.cols(); ++c) row.push_back(fmt_double(ft.X(v, c)));
    rows.push_back(std::move(row));
  }
  write_csv(dir / "features.csv", rows);

  if (ft.has_split()) {
    std::vector<CsvRow> srows = {{"id", "split"}};
    static const char* names[3] = {"train", "val", "test"};
    for (u64 v = 0; v < ft.split.size(); ++v)
      srows.push_back({std::to_string(v), names[ft.split[v]]});
    write_csv(dir / "split.csv", srows);
  }

  if (schema) {
    json j;
    j["width"] = schema->width();
    j["feature_names"] = schema->feature_names();
    json cats;
    auto emit = [&cats](const CategoricalSchema& cs) {
      std::vector<std::string> vals = cs.kept;
      vals.push_back("other");
      cats[cs.name] = vals;
    };
    emit(schema->land_use);
    for (const auto& cs : schema->edge_cats) emit(cs);
    j["categorical"] = cats;
    json nums;
    for (const auto& st : schema->numeric)
      nums[st.name] = {{"mean", st.mean}, {"std", st.std}};
    j["numeric"] = nums;
    std::ofstream out(dir / "schema.json");
    out << j.dump(2) << "\n";
    if (!out) throw input_error("cannot write " + (dir / "schema.json").string());
  }
}

Bundle load_bundle(const std::filesystem::path& dir) {
  Bundle bundle;
  bundle.g = load_graph(dir / "graph.bin");
  const u64 n = bundle.g.n_nodes;

  const auto rows = read_csv(dir / "features.csv");
  if (rows.empty()) throw input_error((dir / "features.csv").string() + ": empty");
  if (rows[0].empty() || rows[0][0] != "id")
    throw input_error((dir / "features.csv").string() + ": bad header");
  const u64 d = rows[0].size() - 1;
  bundle.ft.feature_names.assign(rows[0].begin() + 1, rows[0].end());
  if (rows.size() != n + 1)
    throw input_error((dir / "features.csv").string() + ": row count mismatch");
  bundle.ft.X = Mat::Zero(static_cast<i64>(n), static_cast<i64>(d));
  for (u64 v = 0; v < n; ++v) {
    const auto& row = rows[v + 1];
    const auto ctx = line_ctx(dir / "features.csv", v);
    if (row.size() != d + 1) throw input_error(ctx + ": wrong field count");
    if (parse_u64(row[0], ctx) != v) throw input_error(ctx + ": ids must be dense");
    for (u64 c = 0; c < d; ++c)
      bundle.ft.X(static_cast<i64>(v), static_cast<i64>(c)) =
          parse_double(row[c + 1], ctx);
  }

  if (std::filesystem::exists(dir / "split.csv")) {
    const auto srows = read_csv(dir / "split.csv");
    if (srows.size() != n + 1)
      throw input_error((dir / "split.csv").string() + ": row count mismatch");
    bundle.ft.split.assign(n, kTest);
    for (u64 v = 0; v < n; ++v) {
      const auto& row = srows[v + 1];
      const auto ctx = line_ctx(dir / "split.csv", v);
      if (row.size() != 2) throw input_error(ctx + ": wrong field count");
      const u64 id = parse_u64(row[0], ctx);
      if (id != v) throw input_error(ctx + ": ids must be dense");
      if (row[1] == "train") bundle.ft.split[v] = kTrain;
      else if (row[1] == "val") bundle.ft.split[v] = kVal;
      else if (row[1] == "test") bundle.ft.split[v] = kTest;
      else throw input_error(ctx + ": bad split value '" + row[1] + "'");
    }
  }

  if (std::filesystem::exists(dir / "labels.csv")) {
    const auto res = load_labels(dir / "labels.csv");
    if (res.labels.size() != n)
      throw input_error((dir / "labels.csv").string() + ": row count mismatch");
    bundle.ft.y = res.labels;
    bundle.epsilon_hat = res.epsilon_hat;
  }
  return bundle;
}

FeatureTable basic_features(const Graph& g) {
  FeatureTable ft;
  ft.feature_names = {"x", "y", "degree", "mean_edge_weight"};
  ft.X = Mat::Zero(i64(g.n_nodes), 4);
  for (u64 v = 0; v < g.n_nodes; ++v) {
    if (g.has_coords) {
      ft.X(i64(v), 0) = g.lon[v];
      ft.X(i64(v), 1) = g.lat[v];
    }
    const auto wt = g.nbr_weights(v);
    ft.X(i64(v), 2) = double(wt.size());
    double sum = 0.0;
    for (double w : wt) sum += w;
    ft.X(i64(v), 3) = wt.empty() ? 0.0 : sum / double(wt.size());
  }
  return ft;
}

}  // namespace lrgk
