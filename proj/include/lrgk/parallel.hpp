#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lrgk {

// Process-wide default for worker counts (CLI --threads). Library default is
// 1 so tests and embedded use are bit-exact unless a caller opts in.
inline int& detail_thread_count() {
  static int n = 1;
  return n;
}
inline int default_threads() { return detail_thread_count(); }
inline void set_default_threads(int n) { detail_thread_count() = n <= 0 ? 1 : n; }

// Static range split. body(begin, end) runs on half-open chunks; callers
// write to disjoint slots so the result is schedule-independent. threads<=1
// (or tiny n) degenerates to a plain sequential call.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n ? n : 1);
  if (nt <= 1 || n < 2) {
    body(static_cast<std::size_t>(0), n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  parallel_for(n, default_threads(), static_cast<Body&&>(body));
}

}  // namespace lrgk
