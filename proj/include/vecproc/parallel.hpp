#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace vecproc {

/// Caps the number of worker threads used by parallel_for (0 = hardware concurrency).
void set_worker_count(unsigned count) noexcept;
unsigned worker_count() noexcept;

/// Calls body(i) for i in [0, count) over contiguous index blocks.
/// Callers write results into per-index slots and reduce sequentially, which
/// keeps every result independent of the worker count.
/// Runs serially when count < 2 * min_per_worker or when already inside a worker.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_per_worker = 1);

}  // namespace vecproc
