#pragma once

#include <functional>

namespace cftdist {

// Worker count: hardware concurrency capped by CFTDIST_THREADS when set.
int worker_count();

// Runs body(i) for i in [0, n). The first exception thrown by any index is
// rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace cftdist
