#include "wulffspread/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include <omp.h>

namespace wulffspread {

int worker_count() {
  int threads = omp_get_max_threads();
  if (const char* cap = std::getenv("WULFFSPREAD_THREADS")) {
    try {
      int requested = std::stoi(cap);
      if (requested > 0 && requested < threads) threads = requested;
    } catch (const std::exception&) {
      // Malformed values leave the OpenMP default in place.
    }
  }
  return threads;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long long i = 0; i < count; ++i) {
    {
      std::lock_guard<std::mutex> lock(guard);
      if (first) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace wulffspread
