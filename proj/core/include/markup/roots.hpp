#pragma once

#include <functional>
#include <optional>

namespace markup {

struct RootOptions {
    double rel_tol = 1e-12;
    int max_iterations = 100;
};

/// Solves g(x) = target for nondecreasing g on [lo, hi] with g(lo) <= target
/// <= g(hi). Bisection keeps the bracket, Newton steps (when a derivative is
/// supplied and the step stays inside the bracket) polish the root.
double solve_monotone(const std::function<double(double)>& g, double target, double lo, double hi,
                      const std::function<double(double)>& derivative = {},
                      const RootOptions& opts = {});

/// Expands hi geometrically from `start` until g(hi) >= target. Returns
/// nullopt if `max_doublings` is exhausted.
std::optional<double> bracket_above(const std::function<double(double)>& g, double target,
                                    double start, int max_doublings = 2000);

}  // namespace markup
