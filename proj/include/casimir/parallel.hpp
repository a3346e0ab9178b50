#pragma once

#include <cstddef>
#include <functional>

namespace casimir {

/// Worker count from CASIMIR_WORKERS, else hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is visited
/// exactly once; callers write results into per-index slots and reduce serially afterwards,
/// which keeps sums bit-reproducible regardless of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace casimir
