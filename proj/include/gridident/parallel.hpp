#pragma once

#include <cstddef>
#include <functional>

namespace gridident {

/// Worker count: hardware concurrency, capped by GRIDIDENT_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Tasks are
/// handed out in index order; callers write into slot i so the merged result
/// does not depend on scheduling. The first exception thrown is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gridident
