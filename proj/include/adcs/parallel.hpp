#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace adcs {

/// ADCS_THREADS when set to a positive integer, else hardware concurrency.
unsigned default_threads();

/**
 * Runs fn(i) for i in [0, n) on up to `threads` workers pulling indices in
 * order. Returns one exception slot per index (null on success); results are
 * for the caller to store by index, so output order never depends on timing.
 */
std::vector<std::exception_ptr> parallel_for(std::size_t n, unsigned threads,
                                             const std::function<void(std::size_t)> &fn);

}  // namespace adcs
