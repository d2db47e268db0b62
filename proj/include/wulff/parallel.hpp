#pragma once

#include <cstddef>
#include <functional>

namespace wulff {

/// Process-wide worker count used by parallel_for; defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n) split into contiguous chunks, one per worker.
/// Each index is handled by exactly one worker, so results written per index
/// do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wulff
