// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>

namespace normbridge {

/// Worker count: NORMBRIDGE_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs f(0), ..., f(n-1) on up to thread_count() threads. Each index runs
/// exactly once; callers write results into per-index slots. The first
/// exception thrown by any f is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace normbridge
