#pragma once

#include <cstddef>
#include <functional>

namespace dispcancel {

// Worker count: DISPCANCEL_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t thread_cap();

// Calls body(i) for every i in [0, count) on up to `threads` workers
// (0 = thread_cap()). Indices are handed out dynamically; callers that need
// deterministic results must make body(i) depend on i only. The first
// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace dispcancel
