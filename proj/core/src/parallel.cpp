#include "markup/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

namespace markup {

std::size_t worker_count() {
    if (const char* env = std::getenv("MARKUP_GUARANTEE_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) {
                return static_cast<std::size_t>(n);
            }
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace detail {

void run_indexed(std::size_t n, const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto loop = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(loop);
    }
    pool.clear();
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace detail
}  // namespace markup
