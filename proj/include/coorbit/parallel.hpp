#pragma once

#include <cstddef>
#include <functional>

namespace coorbit {

// Global worker cap. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
// so results written per index are deterministic regardless of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace coorbit
