#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrgk/graph.hpp"
#include "lrgk/rng.hpp"
#include "lrgk/types.hpp"

namespace lrgk {

// Raw interchange records. After load_city / generation, node ids are dense
// 0..n-1 and aligned with the Graph; edge rows keep their original
// multiplicity (directed / parallel duplicates) for feature aggregation.
struct RawNode {
  u64 id = 0;
  double lon = 0, lat = 0;
  double street_count = 0;
  std::string land_use;
};

struct RawEdge {
  u64 u = 0, v = 0;
  double length = 0, speed = 0;
  std::string one_way, reversed, lanes, road_type;
};

struct RawCityRecord {
  std::vector<RawNode> nodes;
  std::vector<RawEdge> edges;
};

// Split mask values.
enum : u8 { kTrain = 0, kVal = 1, kTest = 2 };

struct FeatureTable {
  Mat X;                                  // n_nodes x width
  std::vector<int> y;                     // class per node, empty = unset
  std::vector<u8> split;                  // kTrain/kVal/kTest, empty = unset
  std::vector<std::string> feature_names; // ordered, size = width
  bool has_labels() const { return !y.empty(); }
  bool has_split() const { return !split.empty(); }
};

struct CategoricalSchema {
  std::string name;
  std::vector<std::string> kept;  // top-8 by frequency; "other" is implicit last
};

struct NumericStat {
  std::string name;
  double mean = 0, std = 0;  // population std over nodes; std 0 encodes to zeros
};

struct EncodingSchema {
  CategoricalSchema land_use;                  // node block
  std::vector<CategoricalSchema> edge_cats;    // one_way, reversed, lanes, road_type
  std::vector<NumericStat> numeric;            // lon, lat, street_count, length, speed
  u64 width() const;
  std::vector<std::string> feature_names() const;
};

// CSV city loader. nodes: id,lon,lat,street_count,land_use
//                  edges: u,v,length,speed,one_way,reversed,lanes,road_type
// Parallel/antiparallel edges merge into one undirected edge (mean length);
// the largest connected component is kept and ids densified; the returned
// record is remapped the same way with off-component rows dropped.
std::pair<Graph, RawCityRecord> load_city(const std::filesystem::path& nodes_file,
                                          const std::filesystem::path& edges_file);

EncodingSchema build_schema(const RawCityRecord& raw);

// Node block [lon, lat, street_count, onehot(land_use)] then edge block
// mean over incident raw edge rows of [length, speed, onehot(one_way),
// onehot(reversed), onehot(lanes), onehot(road_type)]. True numeric columns
// standardized with the schema stats; one-hot (and averaged one-hot) stay raw.
FeatureTable encode_features(const Graph& g, const RawCityRecord& raw,
                             const EncodingSchema& schema);

std::vector<u8> make_split(u64 n_nodes, const std::array<double, 3>& fractions,
                           u64 seed);

struct WeightLaw {
  enum class Kind { Constant, Uniform, LogNormal };
  Kind kind = Kind::Uniform;
  double a = 50.0, b = 150.0;  // Uniform(lo,hi) / LogNormal(mu,sigma) / Constant(a)
  double sample(Rng& rng) const;
  static WeightLaw parse(const std::string& text);  // "uniform:50,150" etc.
  std::string str() const;
};

// width x height lattice with grid coordinates, block-structured categorical
// attributes, and edge lengths = weight_law sample scaled by the block's road
// class. With probability perturb_p an edge is removed when the graph stays
// connected. Deterministic in seed.
std::pair<Graph, RawCityRecord> gen_grid_city(u64 width, u64 height,
                                              const WeightLaw& weight_law,
                                              double perturb_p, u64 seed);

// Watts-Strogatz ring lattice (k even) with rewiring probability rewire_p,
// unit edge weights, ring coordinates. Connectivity enforced by reseeded retry.
Graph gen_small_world(u64 n, u64 k, double rewire_p, u64 seed);

// Minimal feature table for graphs without city attributes: coordinates
// (zeros when absent), degree, and mean incident edge weight.
FeatureTable basic_features(const Graph& g);

// Dataset bundle directory: graph.bin, features.csv, split.csv, schema.json
// (+ labels.csv once the labeling pass has run).
void save_bundle(const std::filesystem::path& dir, const Graph& g,
                 const FeatureTable& ft, const EncodingSchema* schema);

struct Bundle {
  Graph g;
  FeatureTable ft;  // y filled when labels.csv is present
  std::vector<double> epsilon_hat;  // parallel to y when labels present
};
Bundle load_bundle(const std::filesystem::path& dir);

}  // namespace lrgk
