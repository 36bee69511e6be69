#pragma once

#include <cstddef>
#include <functional>

namespace hallhom {

/// Number of hardware threads, at least 1.
int default_parallelism();

/// Run body(0..count-1) on up to `threads` worker threads (threads <= 0 means
/// default_parallelism()). Iterations must not share mutable state. The first
/// exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace hallhom
