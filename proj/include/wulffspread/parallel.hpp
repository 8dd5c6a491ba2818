#pragma once

#include <cstddef>
#include <functional>

namespace wulffspread {

/// OpenMP thread count, capped by WULFFSPREAD_THREADS when it is set.
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. The first
/// exception thrown by any iteration is rethrown after the loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wulffspread
