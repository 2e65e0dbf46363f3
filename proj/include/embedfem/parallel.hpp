#pragma once

#include "embedfem/types.hpp"

#include <functional>

namespace embedfem {

/// Worker count: EMBEDFEM_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads.
/// Iterations are split into contiguous blocks; body must only write
/// state owned by index i. The first exception thrown is rethrown.
void parallel_for(Index n, const std::function<void(Index)>& body);

}  // namespace embedfem
