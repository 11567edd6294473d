#ifndef CHV_PARALLEL_HPP
#define CHV_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace chv {

// Process-wide cap on worker threads (0 = hardware concurrency).
// Sweep drivers lower it when they parallelize at a coarser level.
void set_thread_budget(int n);
int thread_budget();

// Runs fn(i) for i in [0, n). Work is split into fixed-size blocks that do
// not depend on the thread count, so any reduction done per block index is
// reproducible on any machine. fn must write only to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace chv

#endif
