#pragma once

#include <cstddef>
#include <functional>

namespace online_alloc {

/// ONLINE_ALLOC_THREADS when set to a positive integer, else `requested`
/// when positive, else the hardware concurrency (at least 1).
std::size_t resolve_thread_count(std::size_t requested = 0);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; body must only write to per-index state. The
/// first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace online_alloc
