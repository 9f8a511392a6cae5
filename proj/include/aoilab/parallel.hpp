#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace aoilab {

// Worker count: AOI_LAB_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks; each index's
// result must be written to its own slot so the outcome does not depend on the
// thread count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace aoilab
