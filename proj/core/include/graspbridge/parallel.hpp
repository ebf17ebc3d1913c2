#pragma once

#include <cstddef>
#include <functional>

namespace graspbridge {

/// Worker count from GRASPBRIDGE_THREADS. 0 (or unset on a single-core host)
/// means run inline on the calling thread.
std::size_t worker_count();

/// Overrides the environment for the rest of the process; mainly for tests.
void set_worker_count(std::size_t n);

/// Calls body(i) for i in [0, n). Work is split into contiguous blocks; each
/// index is visited exactly once, so results written by index are independent
/// of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace graspbridge
