#pragma once

// Reference computations used only by the tests. None of these call into
// the library, so agreement is evidence rather than tautology.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

using Fn = std::function<long double(long double)>;

/// Tanh-sinh on [a, b] in long double; endpoints are never evaluated, so
/// jumps and integrable singularities at a or b are fine.
inline long double integrate(const Fn& f, long double a, long double b, long double tol = 1e-13L) {
    if (!(b > a)) {
        return 0;
    }
    static boost::math::quadrature::tanh_sinh<long double> rule;
    // Abscissae may round onto an endpoint once the integrand narrows x to double.
    const long double lo = std::isfinite(a) ? std::nextafter(static_cast<double>(a), HUGE_VAL) : a;
    const long double hi = std::isfinite(b) ? std::nextafter(static_cast<double>(b), -HUGE_VAL) : b;
    auto g = [&](long double x) -> long double { return f(std::clamp(x, lo, hi)); };
    return rule.integrate(g, a, b, tol);
}

/// Sum over consecutive pieces.
inline long double integrate_pieces(const Fn& f, const std::vector<long double>& nodes, long double tol = 1e-13L) {
    long double s = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        s += integrate(f, nodes[i], nodes[i + 1], tol);
    }
    return s;
}

/// int_a^inf f.
inline long double integrate_to_infinity(const Fn& f, long double a, long double tol = 1e-13L) {
    return integrate(f, a, std::numeric_limits<long double>::infinity(), tol);
}

inline std::vector<std::size_t> jarvis_lower_hull(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::size_t> hull{0};
    std::size_t cur = 0;
    while (cur + 1 < x.size()) {
        std::size_t best = cur + 1;
        long double best_slope = std::numeric_limits<long double>::infinity();
        for (std::size_t j = cur + 1; j < x.size(); ++j) {
            const long double s =
                (static_cast<long double>(y[j]) - y[cur]) / (static_cast<long double>(x[j]) - x[cur]);
            if (s <= best_slope) {
                best_slope = s;
                best = j;
            }
        }
        hull.push_back(best);
        cur = best;
    }
    return hull;
}

/// Per-cell slopes of the lower hull on the grid.
inline std::vector<double> hull_cell_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const auto hull = jarvis_lower_hull(x, y);
    std::vector<double> slopes(x.size() - 1);
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const std::size_t a = hull[h];
        const std::size_t b = hull[h + 1];
        const double s = (y[b] - y[a]) / (x[b] - x[a]);
        for (std::size_t i = a; i < b; ++i) {
            slopes[i] = s;
        }
    }
    return slopes;
}

struct Menu {
    double profit = -std::numeric_limits<double>::infinity();
    std::vector<double> q;
    std::vector<double> t;
};

/// Brute-force screening for a few discrete types: every nondecreasing
/// quality vector on the grid, with transfers chosen as the largest ones
/// satisfying all pairwise IC and IR constraints (found by iterating the
/// constraint system to its fixed point, not by a closed form).
inline Menu brute_force_screening(const std::vector<double>& v, const std::vector<double>& f,
                                  const std::vector<double>& grid, const std::function<double(double)>& cost) {
    const std::size_t n = v.size();
    Menu best;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = grid[idx[i]];
        }
        // t_i <= v_i q_i (IR) and t_i <= v_i q_i - (v_i q_j - t_j) (IC).
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = v[i] * q[i];
        }
        for (int sweep = 0; sweep < 4 * static_cast<int>(n) + 4; ++sweep) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double cap = v[i] * q[i] - (v[i] * q[j] - t[j]);
                    if (cap < t[i] - 1e-15) {
                        t[i] = cap;
                        changed = true;
                    }
                }
            }
            if (!changed) {
                break;
            }
        }
        double profit = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            profit += f[i] * (t[i] - cost(q[i]));
        }
        if (profit > best.profit) {
            best = {profit, q, t};
        }
        // Next nondecreasing index vector.
        std::size_t k = n;
        while (k > 0 && idx[k - 1] + 1 == grid.size()) {
            --k;
        }
        if (k == 0) {
            break;
        }
        ++idx[k - 1];
        for (std::size_t i = k; i < n; ++i) {
            idx[i] = idx[k - 1];
        }
    }
    return best;
}

}  // namespace oracle
