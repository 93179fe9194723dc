#ifndef KICKCAST_PARALLEL_HPP
#define KICKCAST_PARALLEL_HPP

#include <cstdint>
#include <thread>
#include <vector>

namespace kickcast {

// Runs fn(begin, end, chunk_index) over disjoint chunks of [0, n), possibly
// on several threads. The chunk count adapts to the machine, so callers that
// need reproducible results must either write per-index slots or aggregate
// values whose combination is exact (integer counts).
template <typename Fn>
void parallel_chunks(int64_t n, const Fn& fn) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int64_t n_chunks = std::min<int64_t>(n, hw == 0 ? 1 : hw);
  if (n_chunks <= 1) {
    fn(int64_t{0}, n, int64_t{0});
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(n_chunks));
  for (int64_t c = 0; c < n_chunks; ++c) {
    int64_t begin = n * c / n_chunks;
    int64_t end = n * (c + 1) / n_chunks;
    workers.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
  }
  for (auto& w : workers) w.join();
}

// Parallel loop writing one result per index; deterministic because every
// index owns its slot.
template <typename Fn>
void parallel_for(int64_t n, const Fn& fn) {
  parallel_chunks(n, [&fn](int64_t begin, int64_t end, int64_t) {
    for (int64_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace kickcast

#endif
