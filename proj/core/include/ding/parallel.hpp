#pragma once

#include <cstddef>
#include <functional>

namespace ding {

inline constexpr const char* kThreadsEnvVar = "DING_THREADS";

/// Worker count: DING_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks; body
/// must only write to state owned by index i. The first exception thrown by
/// any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ding
