#include "arw/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace arw {

int thread_count() {
    if (const char* env = std::getenv("ARW_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v < 1) v = 1;
        if (v > 256) v = 256;
        return static_cast<int>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_blocks(std::int64_t n_blocks,
                     const std::function<void(std::int64_t)>& body) {
    if (n_blocks <= 0) return;
    int workers = thread_count();
    if (workers > n_blocks) workers = static_cast<int>(n_blocks);
    if (workers <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) body(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            std::int64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                body(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace arw
