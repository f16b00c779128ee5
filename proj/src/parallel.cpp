#include "ealign/parallel.hpp"

#include <algorithm>

namespace ealign {

namespace {
int g_workers = 1;
}

int worker_count() { return g_workers; }

void set_worker_count(int n) { g_workers = std::max(1, n); }

void for_chunks(Index n, const std::function<void(Index, Index)>& body) {
  if (n <= 0) return;
  const Index nchunks = (n + kChunk - 1) / kChunk;
  const int workers = static_cast<int>(std::min<Index>(g_workers, nchunks));
  if (workers <= 1) {
    for (Index c = 0; c < nchunks; ++c)
      body(c * kChunk, std::min(n, (c + 1) * kChunk));
    return;
  }
  std::atomic<Index> next{0};
  auto run = [&] {
    for (;;) {
      const Index c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      body(c * kChunk, std::min(n, (c + 1) * kChunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

double reduce_chunks(Index n, const std::function<double(Index, Index)>& partial) {
  if (n <= 0) return 0.0;
  const Index nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> parts(static_cast<size_t>(nchunks), 0.0);
  for_chunks(n, [&](Index b, Index e) { parts[static_cast<size_t>(b / kChunk)] = partial(b, e); });
  double s = 0.0, comp = 0.0;
  for (double x : parts) {
    const double t = s + x;
    comp += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + comp;
}

}  // namespace ealign
