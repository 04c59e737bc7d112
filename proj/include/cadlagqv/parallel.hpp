#pragma once

#include <cstddef>
#include <functional>

namespace cadlag {

// Worker threads used by parallel_for: the CADLAG_QV_THREADS environment
// variable when set (clamped to >= 1), otherwise the hardware concurrency.
// Read on every call, so a test or CLI run can pin the count.
std::size_t worker_count();

// Runs fn(i) for every i in [0, count). Per-index work must be independent;
// for deterministic results regardless of scheduling, write into
// preallocated per-index slots and reduce serially afterwards. The first
// exception thrown by any worker is rethrown after all workers finish.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cadlag
