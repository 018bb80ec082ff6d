#pragma once

#include <cstdint>
#include <functional>

namespace arw {

// Worker count: ARW_THREADS environment variable if set (clamped to [1,256]),
// otherwise std::thread::hardware_concurrency().  This is the only knob read
// from the environment; it must never change numerical results, only wall
// time, because all parallel loops below are over fixed-size blocks whose
// outputs are reduced serially in block order.
int thread_count();

// Run body(block) for block = 0..n_blocks-1, possibly on several threads.
// body must only write state owned by its block index.  Exceptions from
// workers are rethrown on the calling thread.
void parallel_blocks(std::int64_t n_blocks,
                     const std::function<void(std::int64_t)>& body);

}  // namespace arw
