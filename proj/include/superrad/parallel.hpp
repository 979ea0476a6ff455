#pragma once

#include <cstddef>
#include <functional>

namespace superrad {

/// Worker count: the SUPERRAD_WORKERS environment variable when it holds a
/// positive integer, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls f(i) for i in [0, n) on up to `workers` threads (0 selects
/// worker_count()). Calls made from inside a worker run serially, so nested
/// use does not oversubscribe. The first exception thrown by any call is
/// rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, std::size_t workers = 0);

} // namespace superrad
