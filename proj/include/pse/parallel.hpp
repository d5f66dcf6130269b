#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pse {

/// Worker count used by parallel loops: explicit argument, else the
/// POINTSET_ERGODICS_WORKERS environment variable, else hardware threads.
inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("POINTSET_ERGODICS_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(worker, begin, end) on contiguous index chunks. Chunk
/// boundaries depend only on (n, workers), so per-worker partial results
/// merged in worker order are reproducible for a pinned worker count.
template <typename Body>
void parallel_chunks(size_t n, int workers, Body&& body) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n < 2) {
    body(0, size_t{0}, n);
    return;
  }
  size_t w = static_cast<size_t>(workers);
  if (w > n) w = n;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (size_t k = 0; k < w; ++k) {
    size_t begin = n * k / w;
    size_t end = n * (k + 1) / w;
    threads.emplace_back([&body, k, begin, end] { body(static_cast<int>(k), begin, end); });
  }
  for (auto& t : threads) t.join();
}

/// Sum of term(i) for i in [0, n), accumulated per worker and merged in
/// worker-index order.
template <typename Term>
double parallel_sum(size_t n, int workers, Term&& term) {
  workers = resolve_workers(workers);
  size_t w = static_cast<size_t>(workers <= 1 ? 1 : workers);
  if (w > n && n > 0) w = n;
  if (w == 0) w = 1;
  std::vector<double> partial(w, 0.0);
  parallel_chunks(n, static_cast<int>(w), [&](int worker, size_t begin, size_t end) {
    double acc = 0.0;
    for (size_t i = begin; i < end; ++i) acc += term(i);
    partial[static_cast<size_t>(worker)] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace pse
