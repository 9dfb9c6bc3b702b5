#include "papm/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace papm {

int thread_budget() {
    static const int budget = [] {
        const char* env = std::getenv("PAPM_THREADS");
        if (!env) return 0;
        int v = std::atoi(env);
        return v > 0 ? v : 0;
    }();
    return budget;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const int budget = thread_budget();
    if (budget <= 1 || n < 2) {
        body(0, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(budget, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace papm
