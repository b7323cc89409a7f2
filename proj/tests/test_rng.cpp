#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "lrgk/rng.hpp"

using namespace lrgk;

TEST_CASE("rng: identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(42), d(43);
  bool diverged = false;
  for (int i = 0; i < 10 && !diverged; ++i) diverged = c.next_u64() != d.next_u64();
  CHECK(diverged);
}

TEST_CASE("rng: uniform() lands in [0,1) and fills the range") {
  Rng r(7);
  double mn = 1.0, mx = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mn = std::min(mn, u);
    mx = std::max(mx, u);
  }
  CHECK(mn < 0.001);
  CHECK(mx > 0.999);
}

TEST_CASE("rng: uniform(lo,hi) stays inside the interval") {
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform(-3.0, 5.0);
    REQUIRE(u >= -3.0);
    REQUIRE(u < 5.0);
  }
}

TEST_CASE("rng: below(n) is in range and hits every residue") {
  Rng r(3);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const u64 v = r.below(10);
    REQUIRE(v < 10);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);  // ~1000 expected each
}

TEST_CASE("rng: bernoulli edge probabilities") {
  Rng r(5);
  for (int i = 0; i < 100; ++i) {
    CHECK(r.bernoulli(1.0));
    CHECK_FALSE(r.bernoulli(0.0));
  }
}

TEST_CASE("rng: normal moments") {
  Rng r(13);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng: lognormal is positive with the right log-moments") {
  Rng r(17);
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.lognormal(4.0, 0.25);
    REQUIRE(x > 0.0);
    const double l = std::log(x);
    sum += l;
    sq += l * l;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 4.0) < 0.01);
  CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 0.25) < 0.01);
}

TEST_CASE("rng: shuffle permutes and is seed-deterministic") {
  std::vector<u64> v(100);
  std::iota(v.begin(), v.end(), u64(0));
  std::vector<u64> w = v;
  Rng a(21);
  a.shuffle(v);
  Rng b(21);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<u64> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<u64> iota(100);
  std::iota(iota.begin(), iota.end(), u64(0));
  CHECK(sorted == iota);
  bool moved = false;
  for (size_t i = 0; i < v.size(); ++i) moved = moved || v[i] != i;
  CHECK(moved);
}

TEST_CASE("rng: sample_without_replacement draws distinct in-range values") {
  Rng r(31);
  const auto s = r.sample_without_replacement(50, 20);
  REQUIRE(s.size() == 20);
  std::set<u64> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 20);
  for (u64 v : s) CHECK(v < 50);

  // k == n yields a permutation
  Rng r2(33);
  const auto all = r2.sample_without_replacement(10, 10);
  std::set<u64> u2(all.begin(), all.end());
  CHECK(u2.size() == 10);
}

TEST_CASE("rng: seed_mix separates nearby inputs") {
  std::set<u64> seen;
  for (u64 a = 0; a < 50; ++a)
    for (u64 b = 0; b < 50; ++b) seen.insert(seed_mix(a, b));
  CHECK(seen.size() == 2500);
  CHECK(seed_mix(1, 2) != seed_mix(2, 1));
}
