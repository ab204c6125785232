#include "markup/quadrature.hpp"

#include "markup/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace markup {
namespace {

// Kronrod abscissae and weights (15 points); odd indices are the 7 Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * kXgk[jtw];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * kXgk[jtwm1];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    const double scale = std::abs(half);
    const double value = resk * half;
    resabs *= scale;
    resasc *= scale;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    if (!std::isfinite(value)) {
        throw QuadratureError("non-finite integrand value on [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "]",
                              std::numeric_limits<double>::infinity());
    }
    return {a, b, value, err};
}

constexpr std::size_t kEvalsPerPanel = 15;

}  // namespace

Estimate integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw DomainError("integrate: finite bounds required");
    }
    if (a == b) {
        return {};
    }
    if (b < a) {
        Estimate flipped = integrate(f, b, a, opts);
        flipped.value = -flipped.value;
        return flipped;
    }

    std::priority_queue<Panel> heap;
    Panel first = gauss_kronrod(f, a, b);
    std::size_t evals = kEvalsPerPanel;
    double total = first.value;
    double total_err = first.error;
    heap.push(first);

    // Panels too narrow to split further are retired with their error.
    double retired_err = 0.0;
    double retired_value = 0.0;

    auto converged = [&] {
        return total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    };

    while (!converged() && !heap.empty()) {
        if (evals + 2 * kEvalsPerPanel > opts.max_evaluations) {
            throw QuadratureError("integrate: evaluation budget exhausted on [" + std::to_string(a) +
                                      ", " + std::to_string(b) + "], achieved error " +
                                      std::to_string(total_err),
                                  total_err);
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(worst.a), std::abs(worst.b))) {
            retired_err += worst.error;
            retired_value += worst.value;
            continue;
        }
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        evals += 2 * kEvalsPerPanel;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the panels to shed accumulated cancellation in `total`.
    double value = retired_value;
    double error = retired_err;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, evals};
}

Estimate integrate_to_infinity(const Integrand& f, double a, const QuadratureOptions& opts) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw DomainError("integrate_to_infinity: lower bound must be finite and >= 0");
    }
    Estimate result;
    double lo = a;
    if (lo < 1.0) {
        result += integrate(f, lo, 1.0, opts);
        lo = 1.0;
    }

    QuadratureOptions panel_opts = opts;
    // Panels are summed, so each needs a little headroom.
    panel_opts.rel_tol = opts.rel_tol * 0.1;

    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_ratio = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    for (int j = 0; j < 1100; ++j) {
        const double hi = 2.0 * lo;
        if (!std::isfinite(hi)) {
            break;
        }
        panel_opts.max_evaluations =
            opts.max_evaluations > result.evaluations ? opts.max_evaluations - result.evaluations : 0;
        const Estimate panel = integrate(f, lo, hi, panel_opts);
        result += panel;
        lo = hi;

        const bool have_ratio = std::isfinite(prev) && prev != 0.0;
        const double ratio = have_ratio ? panel.value / prev : std::numeric_limits<double>::quiet_NaN();

        if (panel.value == 0.0 && j > 0 && prev == 0.0) {
            return result;
        }
        if (have_ratio && std::isfinite(prev_ratio) &&
            std::abs(ratio - prev_ratio) <= 1e-9 * std::abs(ratio)) {
            ++stable;
        } else {
            stable = 0;
        }
        if (have_ratio && ratio > 0.0 && ratio < 1.0) {
            const double tail = panel.value * ratio / (1.0 - ratio);
            const bool negligible = std::abs(panel.value) <= 0.01 * opts.rel_tol * std::abs(result.value) &&
                                    ratio < 0.75;
            if (negligible || stable >= 2) {
                const double drift = std::abs(ratio - prev_ratio);
                result.value += tail;
                result.error += panel.error / (1.0 - ratio) +
                                std::abs(panel.value) * drift / ((1.0 - ratio) * (1.0 - ratio));
                return result;
            }
        }
        if (have_ratio && stable >= 2 && ratio >= 1.0) {
            throw QuadratureError("integrate_to_infinity: integral diverges (panel ratio " +
                                      std::to_string(ratio) + ")",
                                  std::numeric_limits<double>::infinity());
        }
        prev_ratio = ratio;
        prev = panel.value;
    }
    throw QuadratureError("integrate_to_infinity: tail did not settle into a convergent power law",
                          result.error);
}

Estimate integrate_piecewise(const Integrand& f, std::span<const double> breakpoints,
                             const QuadratureOptions& opts) {
    Estimate result;
    if (breakpoints.size() < 2) {
        return result;
    }
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (b < a) {
            throw DomainError("integrate_piecewise: breakpoints must be ascending");
        }
        if (std::isinf(b)) {
            result += integrate_to_infinity(f, a, opts);
            break;
        }
        if (b > a) {
            result += integrate(f, a, b, opts);
        }
    }
    return result;
}

}  // namespace markup
