#pragma once

#include <cstddef>
#include <functional>

namespace orbitforge {

/// Worker count: hardware concurrency, capped by ORBITFORGE_THREADS when set.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into index-addressed slots so the outcome does not depend
/// on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace orbitforge
