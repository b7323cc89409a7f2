#include "lrgk/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

#include "lrgk/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "graph.bin codec assumes a little-endian host");

namespace lrgk {

namespace {

constexpr char kMagic[5] = {'L', 'R', 'G', 'K', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void put_vec(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <class T>
std::vector<T> get_vec(std::ifstream& in, u64 count) {
  std::vector<T> v(count);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  return v;
}

}  // namespace

void save_graph(const Graph& g, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw input_error("cannot open for writing: " + file.string());
  out.write(kMagic, sizeof(kMagic));
  put<u8>(out, g.has_coords ? 1 : 0);
  put<u64>(out, g.n_nodes);
  put<u64>(out, g.n_edges);
  put_vec(out, g.offsets);
  put_vec(out, g.neighbors);
  put_vec(out, g.weights);
  if (g.has_coords) {
    put_vec(out, g.lon);
    put_vec(out, g.lat);
  }
  if (!out) throw input_error("short write: " + file.string());
}

Graph load_graph(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw input_error("cannot open: " + file.string());
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw input_error("not a LRGK1 graph file: " + file.string());
  Graph g;
  g.has_coords = get<u8>(in) != 0;
  g.n_nodes = get<u64>(in);
  g.n_edges = get<u64>(in);
  g.offsets = get_vec<u64>(in, g.n_nodes + 1);
  g.neighbors = get_vec<u64>(in, 2 * g.n_edges);
  g.weights = get_vec<double>(in, 2 * g.n_edges);
  if (g.has_coords) {
    g.lon = get_vec<double>(in, g.n_nodes);
    g.lat = get_vec<double>(in, g.n_nodes);
  }
  if (!in) throw input_error("truncated graph file: " + file.string());
  return g;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quote =
      field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quote) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw input_error("cannot open: " + file.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;
  std::size_t line = 1;
  std::size_t quote_line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
        if (c == '\n') ++line;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty())
          throw input_error(file.string() + ":" + std::to_string(line) +
                            ": stray quote inside unquoted field");
        in_quotes = true;
        quote_line = line;
        row_has_data = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_data = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_data || !field.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
          row_has_data = false;
        }
        ++line;
        break;
      default:
        field += c;
        row_has_data = true;
        break;
    }
  }
  if (in_quotes)
    throw input_error(file.string() + ": unterminated quoted field starting on line " +
                      std::to_string(quote_line));
  if (row_has_data || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw input_error("cannot open for writing: " + file.string());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << '\n';
  }
  if (!out) throw input_error("short write: " + file.string());
}

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace lrgk
