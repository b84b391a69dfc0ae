#include "relaygs/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace relaygs {

namespace {

int g_thread_count = 0;  // 0 = unresolved

int resolve_default() {
    if (const char* env = std::getenv("RELAYGS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

}  // namespace

int thread_count() {
    if (g_thread_count == 0) g_thread_count = resolve_default();
    return g_thread_count;
}

void set_thread_count(int n) { g_thread_count = n >= 1 ? n : 0; }

void parallel_for_chunks(size_t n, const std::function<void(int, size_t, size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(thread_count(), n == 0 ? 1 : static_cast<int>(n)));
    if (workers == 1 || n == 0) {
        fn(0, 0, n);
        return;
    }
    const size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) {
        const size_t begin = std::min(n, static_cast<size_t>(w) * chunk);
        const size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    fn(0, 0, std::min(n, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace relaygs
