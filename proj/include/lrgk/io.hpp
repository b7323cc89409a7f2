#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lrgk/graph.hpp"

namespace lrgk {

// Versioned binary graph container. Layout, all little-endian:
//   magic "LRGK1" | u8 has_coords | u64 n_nodes | u64 n_edges |
//   u64 offsets[n+1] | u64 neighbors[2E] | f64 weights[2E] |
//   (f64 lon[n] | f64 lat[n] when has_coords)
void save_graph(const Graph& g, const std::filesystem::path& file);
Graph load_graph(const std::filesystem::path& file);

// Minimal RFC-4180 CSV: fields containing comma, quote or newline are
// quoted; embedded quotes doubled. Rows need not be uniform width.
using CsvRow = std::vector<std::string>;
std::vector<CsvRow> read_csv(const std::filesystem::path& file);
void write_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows);

std::string csv_escape(const std::string& field);

// Formats doubles round-trip exactly (shortest representation).
std::string fmt_double(double x);

}  // namespace lrgk
