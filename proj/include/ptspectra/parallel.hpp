#pragma once

#include <cstddef>
#include <functional>

namespace ptspectra {

/// Worker count: PT_SPECTRA_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. The first
/// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ptspectra
