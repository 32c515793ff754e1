#include "ranndy/parallel.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ranndy {

int worker_count()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1)
        n = 1;
    if (const char* env = std::getenv("RANNDY_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1)
            n = std::min(n, cap);
    }
    return n;
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_fn)
{
    const std::int64_t count = end - begin;
    if (count <= 0)
        return;

    const int workers = std::min<std::int64_t>(worker_count(), count);
    if (workers <= 1 || count < 64) {
        chunk_fn(begin, end);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);

    const std::int64_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = begin + w * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&, lo, hi] {
            try {
                chunk_fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace ranndy
