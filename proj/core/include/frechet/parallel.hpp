#ifndef FRECHET_PARALLEL_HPP
#define FRECHET_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace frechet {

/// Worker count: FRECHET_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for i in [0, count) on up to worker_count() threads. Items
/// are independent; results must be written to per-index slots so the
/// outcome does not depend on scheduling. If any item throws, the exception
/// of the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace frechet

#endif  // FRECHET_PARALLEL_HPP
