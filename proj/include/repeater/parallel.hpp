#pragma once

#include <cstddef>
#include <functional>

namespace repeater {

/// Worker cap: REPEATER_THREADS when set, else hardware concurrency (1..8).
int worker_count();

/// Run fn(i) for i in [0, n) on up to worker_count() threads. Results must be
/// written to per-index slots; the call returns when all indices are done.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace repeater
