#pragma once

#include <functional>

namespace pilotopt {

// Worker count for batch work: PILOTOPT_WORKERS if set (clamped to >= 1),
// otherwise the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Work items
// must be independent and write only to their own slots; any deterministic
// reduction is the caller's job (do it in index order afterwards).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace pilotopt
