#pragma once

#include <cstddef>
#include <functional>

namespace radialcap::detail {

/// Worker count: hardware concurrency, capped by RADIALCAP_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Indices are
/// handed out dynamically; the first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace radialcap::detail
