#pragma once

#include <cstddef>
#include <functional>

namespace selfrep {

// Thread count from SELFREP_THREADS, else hardware concurrency (at least 1).
unsigned default_threads();

// Runs fn(i) for i in [0, n). Work items are claimed dynamically; callers
// write results into index-addressed slots so the outcome does not depend
// on the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace selfrep
