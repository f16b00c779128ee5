// Deterministic data-parallel helpers. Work is split into fixed-size chunks
// whose outputs are disjoint (or combined in fixed chunk order), so results
// are bit-identical at any worker count.
#pragma once

#include "ealign/common.hpp"

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ealign {

int worker_count();
void set_worker_count(int n);

inline constexpr Index kChunk = 256;  // labels per task

// body(begin, end) over [0, n) in chunks of kChunk. Each chunk must write only
// its own outputs.
void for_chunks(Index n, const std::function<void(Index, Index)>& body);

// Deterministic parallel reduction: partial(begin, end) per chunk, partials
// combined by Neumaier accumulation in chunk-index order.
double reduce_chunks(Index n, const std::function<double(Index, Index)>& partial);

}  // namespace ealign
