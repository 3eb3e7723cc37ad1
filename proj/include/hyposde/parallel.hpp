#pragma once

#include <functional>

namespace hyposde {

// Worker pool size: HYPOSDE_THREADS when set, hardware concurrency otherwise.
int worker_count();

// 1 inside a parallel_for worker (nested loops stay sequential), the pool
// size at top level.
int effective_worker_count();

// Runs fn(0..n-1) on the pool. Work items must be independent; results must
// not depend on scheduling.
void parallel_for(long n, const std::function<void(long)>& fn);

}  // namespace hyposde
