#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace biperiodic {

/// Worker count from BIPERIODIC_THREADS (default: hardware concurrency).
inline int worker_count()
{
    if (const char* env = std::getenv("BIPERIODIC_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, count); iterations must touch disjoint state.
template <typename F>
void parallel_for(int count, F&& f)
{
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) f(i);
        });
    }
}

}  // namespace biperiodic
