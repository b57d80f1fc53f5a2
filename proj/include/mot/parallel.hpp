#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace mot {

/// Worker count: MOTSOLVE_THREADS if set and positive, else hardware threads.
inline int thread_count() {
  if (const char* env = std::getenv("MOTSOLVE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(i) for i in [0, n) over contiguous chunks.  Deterministic as long as
/// distinct indices touch distinct state.
template <class F>
void parallel_for(int n, F&& f) {
  int nt = std::min(thread_count(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  int chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&f, lo, hi] {
      for (int i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mot
