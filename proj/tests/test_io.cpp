#include "doctest.h"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lrgk/errors.hpp"
#include "lrgk/graph.hpp"
#include "lrgk/io.hpp"
#include "lrgk/rng.hpp"

using namespace lrgk;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  static fs::path p = [] {
    fs::path d = fs::temp_directory_path() / "lrgk_io_test";
    fs::create_directories(d);
    return d;
  }();
  return p;
}

Graph random_graph(u64 n, double p, u64 seed, bool coords) {
  Rng r(seed);
  GraphBuilder b(n);
  for (u64 i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1, r.uniform(0.5, 2.0));
  for (u64 i = 0; i < n; ++i)
    for (u64 j = i + 2; j < n; ++j)
      if (r.bernoulli(p)) b.add_edge(i, j, r.uniform(0.5, 2.0));
  if (coords) {
    std::vector<double> lon(n), lat(n);
    for (u64 i = 0; i < n; ++i) {
      lon[i] = r.normal();
      lat[i] = r.normal();
    }
    b.set_coords(std::move(lon), std::move(lat));
  }
  return b.build();
}

}  // namespace

TEST_CASE("graph binary round-trip is bitwise") {
  for (bool coords : {false, true}) {
    Graph g = random_graph(37, 0.1, coords ? 5 : 4, coords);
    fs::path f = tmp_dir() / (coords ? "g_coords.bin" : "g.bin");
    save_graph(g, f);
    Graph h = load_graph(f);
    CHECK(h.n_nodes == g.n_nodes);
    CHECK(h.n_edges == g.n_edges);
    CHECK(h.offsets == g.offsets);
    CHECK(h.neighbors == g.neighbors);
    REQUIRE(h.weights.size() == g.weights.size());
    for (size_t i = 0; i < g.weights.size(); ++i) CHECK(h.weights[i] == g.weights[i]);
    CHECK(h.has_coords == coords);
    if (coords) {
      for (u64 i = 0; i < g.n_nodes; ++i) {
        CHECK(h.lon[i] == g.lon[i]);
        CHECK(h.lat[i] == g.lat[i]);
      }
    }
  }
}

TEST_CASE("graph loader rejects corrupt files") {
  fs::path f = tmp_dir() / "bad_magic.bin";
  {
    std::ofstream out(f, std::ios::binary);
    out << "NOPE1xxxxxxxxxxxxxxxxxxx";
  }
  CHECK_THROWS_AS(load_graph(f), input_error);

  Graph g = random_graph(10, 0.2, 9, false);
  fs::path full = tmp_dir() / "full.bin";
  save_graph(g, full);
  // truncate to half
  const auto sz = fs::file_size(full);
  fs::path trunc = tmp_dir() / "trunc.bin";
  {
    std::ifstream in(full, std::ios::binary);
    std::vector<char> buf(sz / 2);
    in.read(buf.data(), i64(buf.size()));
    std::ofstream out(trunc, std::ios::binary);
    out.write(buf.data(), i64(buf.size()));
  }
  CHECK_THROWS_AS(load_graph(trunc), input_error);

  CHECK_THROWS_AS(load_graph(tmp_dir() / "does_not_exist.bin"), input_error);
}

TEST_CASE("csv: quoting round-trip") {
  std::vector<CsvRow> rows = {
      {"id", "note", "lanes"},
      {"1", "plain", "[1, 2]"},
      {"2", "with \"quotes\" inside", "a,b"},
      {"3", "line\nbreak", ""},
  };
  fs::path f = tmp_dir() / "quoting.csv";
  write_csv(f, rows);
  auto back = read_csv(f);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(back[i].size() == rows[i].size());
    for (size_t j = 0; j < rows[i].size(); ++j) CHECK(back[i][j] == rows[i][j]);
  }
}

TEST_CASE("csv: CRLF input parses like LF") {
  fs::path f = tmp_dir() / "crlf.csv";
  {
    std::ofstream out(f, std::ios::binary);
    out << "a,b\r\n1,2\r\n3,4\r\n";
  }
  auto rows = read_csv(f);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][1] == "2");
  CHECK(rows[2][0] == "3");
}

TEST_CASE("csv: unterminated quote reports the line") {
  fs::path f = tmp_dir() / "unterminated.csv";
  {
    std::ofstream out(f);
    out << "a,b\n1,\"open\n";
  }
  CHECK_THROWS_AS(read_csv(f), input_error);
  try {
    read_csv(f);
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("csv_escape rules") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("fmt_double round-trips bitwise") {
  const double cases[] = {0.0,           -0.0,     0.1,    1.0 / 3.0, 15.0,
                          0.47411264906, 1e300,    -1e-300, 3.9375,
                          123456789.123456789,     -2.5e-8};
  for (double x : cases) {
    const std::string s = fmt_double(x);
    const double back = std::stod(s);
    std::uint64_t bx, bb;
    std::memcpy(&bx, &x, 8);
    std::memcpy(&bb, &back, 8);
    CHECK(bx == bb);
  }
  CHECK(fmt_double(15.0) == "15");  // integral values print without exponent noise
}

TEST_CASE("csv writer output is stable across reruns") {
  std::vector<CsvRow> rows = {{"h", "v"}, {"0", fmt_double(1.0 / 3.0)}};
  fs::path f1 = tmp_dir() / "stable1.csv";
  fs::path f2 = tmp_dir() / "stable2.csv";
  write_csv(f1, rows);
  write_csv(f2, rows);
  std::ifstream a(f1, std::ios::binary), b(f2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
}
