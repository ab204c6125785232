#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace markup {

/// Worker cap: MARKUP_GUARANTEE_THREADS if set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

namespace detail {
void run_indexed(std::size_t n, const std::function<void(std::size_t)>& task);
}

/// Evaluates fn(0..n-1) on up to worker_count() threads. Results come back
/// in index order regardless of completion order. The first exception thrown
/// by any task is rethrown after all workers stop.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> out(n);
    detail::run_indexed(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace markup
