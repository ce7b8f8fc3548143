#pragma once

#include <cstddef>
#include <functional>

namespace ihse {

/// Worker count from IHSE_THREADS, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(k) for every k in [0, count). Each index is handled by exactly
/// one worker; callers write results into per-index slots, so the outcome is
/// independent of scheduling. The first exception thrown by a body is
/// rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ihse
