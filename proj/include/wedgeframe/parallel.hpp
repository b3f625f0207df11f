#pragma once

#include <cstddef>
#include <functional>

namespace wedgeframe {

/// Worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [begin, end) split into contiguous chunks. Exceptions
/// thrown by the body are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace wedgeframe
