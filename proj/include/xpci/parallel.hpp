#pragma once

#include <cstddef>
#include <functional>

namespace xpci {

/// Worker count taken from XPCI_THREADS (default: hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Iterations are distributed in contiguous
/// blocks; callers write results into per-index slots and reduce afterwards
/// in index order, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace xpci
