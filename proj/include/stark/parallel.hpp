#pragma once

#include <cstddef>
#include <functional>

namespace stark {

/// Worker count: STARK_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// processed exactly once; callers write results into slot i, so output order
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace stark
