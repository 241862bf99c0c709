// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace vf {

//! Worker count: hardware concurrency capped by the VF_THREADS variable
int worker_count();

/*!
 * Run fn(chunk) for chunk in [0, n_chunks) on up to worker_count() threads.
 * Callers reduce per-chunk results in chunk order, which keeps results
 * independent of the thread count.
 */
void parallel_chunks(std::size_t n_chunks,
                     const std::function<void(std::size_t)>& fn);

}  // namespace vf
