#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace thresh {

/// Worker count: THRESH_RECON_THREADS if set (>= 1), else the hardware count.
inline int thread_count() {
  if (const char* env = std::getenv("THRESH_RECON_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [begin, end) over contiguous chunks. body must only
/// write to per-index state so results do not depend on the thread count.
template <typename Body>
void parallel_for(Eigen::Index begin, Eigen::Index end, Body&& body, Eigen::Index min_chunk = 4096) {
  const Eigen::Index n = end - begin;
  if (n <= 0) return;
  const auto workers = static_cast<Eigen::Index>(
      std::min<Eigen::Index>(thread_count(), std::max<Eigen::Index>(1, n / min_chunk)));
  if (workers <= 1) {
    for (Eigen::Index i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Eigen::Index chunk = (n + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index lo = begin + w * chunk;
    const Eigen::Index hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (Eigen::Index i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace thresh
