#pragma once

#include <cstddef>
#include <functional>

namespace harp {

// 0 or negative -> hardware concurrency.
int resolve_threads(int requested);

// Runs fn(chunk_begin, chunk_end) over a static partition of [0, n) with one
// contiguous chunk per worker. Workers write to disjoint output slots, so the
// result never depends on scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace harp
