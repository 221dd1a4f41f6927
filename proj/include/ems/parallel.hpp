#pragma once

#include <cstddef>
#include <functional>

namespace ems {

/// Worker cap: EMS_THREADS if set to a positive integer, otherwise the
/// hardware concurrency. set_max_threads() overrides both (0 restores).
std::size_t max_threads();
void set_max_threads(std::size_t n);

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// callers write results into per-index slots so output is independent of
/// the thread count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ems
