#include "chv/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace chv {

namespace {
std::atomic<int> g_budget{0};
}

void set_thread_budget(int n) { g_budget.store(n); }

int thread_budget() {
    int b = g_budget.load();
    if (b > 0) return b;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nthreads = thread_budget();
    if (n == 0) return;
    if (nthreads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(nthreads) - 1, n - 1);
    pool.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace chv
