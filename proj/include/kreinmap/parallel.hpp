#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace kreinmap {

// Worker count: KREINMAP_THREADS if set and positive, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("KREINMAP_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(k) for k in [begin, end). Each index is handled by exactly one worker and
// fn must only write to slots owned by k, so results do not depend on the split.
template <class Fn>
void parallel_for(int begin, int end, Fn&& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(thread_count(), count);
  if (workers <= 1 || count < 8) {
    for (int k = begin; k < end; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = begin + w; k < end; k += workers) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kreinmap
