#pragma once

#include <cstddef>
#include <functional>

namespace nucheck {

/// Worker cap: NUCHECK_THREADS if set and positive, else hardware parallelism.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Iterations may run on several threads; the
/// caller stores results by index and reduces them in order afterwards.
/// The first exception thrown by any iteration is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nucheck
