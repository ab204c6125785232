#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace markup {

/// A number together with an absolute error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;

    Estimate& operator+=(const Estimate& other) {
        value += other.value;
        error += other.error;
        evaluations += other.evaluations;
        return *this;
    }
};

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-15;
    std::size_t max_evaluations = 1'000'000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval [a, b].
/// Throws QuadratureError (carrying the achieved error) when the evaluation
/// budget runs out before the tolerance is met.
Estimate integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts = {});

/// Integrates over [a, +inf) using geometric panels [s, 2s]. Once the ratio
/// of consecutive panels stabilizes (power-law tail) the remainder is summed
/// as a geometric series. Requires a >= 0.
Estimate integrate_to_infinity(const Integrand& f, double a, const QuadratureOptions& opts = {});

/// Integrates over consecutive pieces of `breakpoints` (ascending). The last
/// breakpoint may be +inf. Each piece is integrated separately so integrands
/// may jump or kink at breakpoints.
Estimate integrate_piecewise(const Integrand& f, std::span<const double> breakpoints,
                             const QuadratureOptions& opts = {});

}  // namespace markup
