#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hamrot {

// Number of workers used by parallel_map when none is requested.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Evaluates fn(i) for i in [0, n) on a small pool of threads. Results are
// stored by index, so the output never depends on scheduling. The first
// exception (lowest index) is rethrown after all workers finish.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& fn, unsigned workers = 0) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errs(n);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace hamrot
