#pragma once

#include <cstddef>
#include <functional>

namespace lightray {

// Upper bound on worker threads used by the library. Initialised from the
// LIGHTRAY_THREADS environment variable, else the hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(begin, end) over contiguous chunks of [0, count). Callers write
// disjoint outputs and never reduce across chunks, so results do not depend
// on the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lightray
