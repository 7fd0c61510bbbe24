#pragma once

#include <cstddef>
#include <functional>

namespace weightlab {

/// Worker count: WEIGHTLAB_THREADS when set and positive, else the hardware
/// concurrency (at least 1).
int thread_count();

/// Calls body(i) for i in [0, count) across thread_count() workers. Each index
/// is visited exactly once; callers write results by index so reductions stay
/// deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace weightlab
