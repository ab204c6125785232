#include "markup/roots.hpp"

#include "markup/errors.hpp"

#include <cmath>
#include <string>

namespace markup {

double solve_monotone(const std::function<double(double)>& g, double target, double lo, double hi,
                      const std::function<double(double)>& derivative, const RootOptions& opts) {
    if (!(lo <= hi)) {
        throw DomainError("solve_monotone: empty bracket");
    }
    double glo = g(lo) - target;
    double ghi = g(hi) - target;
    if (glo == 0.0) {
        return lo;
    }
    if (ghi == 0.0) {
        return hi;
    }
    if (glo > 0.0 || ghi < 0.0) {
        throw ConvergenceError("solve_monotone: target " + std::to_string(target) +
                               " not bracketed on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double gx = g(x) - target;
        if (gx == 0.0) {
            return x;
        }
        if (gx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= opts.rel_tol * std::max(1.0, std::abs(x)) * 1e-3 ||
            hi - lo <= opts.rel_tol * std::abs(x)) {
            return 0.5 * (lo + hi);
        }
        double next = 0.5 * (lo + hi);
        if (derivative) {
            const double d = derivative(x);
            if (d > 0.0 && std::isfinite(d)) {
                const double newton = x - gx / d;
                if (newton > lo && newton < hi) {
                    next = newton;
                    if (std::abs(newton - x) <= opts.rel_tol * std::abs(x)) {
                        return newton;
                    }
                }
            }
        }
        x = next;
    }
    // Bisection alone halves the bracket 100 times; reaching here means the
    // bracket is below double resolution anyway.
    if (hi - lo <= 1e-10 * std::max(1.0, std::abs(x))) {
        return 0.5 * (lo + hi);
    }
    throw ConvergenceError("solve_monotone: iteration cap reached");
}

std::optional<double> bracket_above(const std::function<double(double)>& g, double target,
                                    double start, int max_doublings) {
    double hi = start > 0.0 ? start : 1.0;
    for (int i = 0; i < max_doublings; ++i) {
        if (g(hi) >= target) {
            return hi;
        }
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            break;
        }
    }
    return std::nullopt;
}

}  // namespace markup
