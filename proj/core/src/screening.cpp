#include "markup/screening.hpp"

#include "markup/errors.hpp"
#include "markup/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace markup {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
    double x;
    bool structural;
};

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace

double virtual_value(const ValueDistribution& F, double v) {
    if (F.atom_mass_at(v) > 0.0) {
        std::ostringstream os;
        os << "virtual_value: undefined at the mass point v=" << v;
        throw DomainError(os.str());
    }
    const double f = F.density(v);
    if (!(f > 0.0) || !std::isfinite(f)) {
        std::ostringstream os;
        os << "virtual_value: density is not positive and finite at v=" << v;
        throw DomainError(os.str());
    }
    return v - (1.0 - F.cdf(v)) / f;
}

VirtualValueCurve::VirtualValueCurve(ValueDistribution F, std::size_t n_grid) : F_(std::move(F)) {
    if (n_grid < 2) {
        throw DomainError("iron: grid needs at least 2 cells");
    }
    const double n = static_cast<double>(n_grid);

    // Atom blocks [F(a-), F(a)] in quantile space.
    std::vector<std::pair<double, double>> blocks;
    for (const auto& a : F_.atoms()) {
        blocks.emplace_back(F_.cdf_left(a.location), F_.cdf(a.location));
    }
    std::vector<Node> nodes;
    nodes.reserve(n_grid + 1 + 2 * blocks.size() + 2 * F_.breakpoints().size());
    for (std::size_t i = 0; i <= n_grid; ++i) {
        nodes.push_back({static_cast<double>(i) / n, i == 0 || i == n_grid});
    }
    for (const auto& [lo, hi] : blocks) {
        nodes.push_back({lo, true});
        nodes.push_back({hi, true});
    }
    for (double b : F_.breakpoints()) {
        nodes.push_back({F_.cdf_left(b), true});
        nodes.push_back({F_.cdf(b), true});
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.x < b.x; });
    std::vector<Node> merged;
    for (const auto& nd : nodes) {
        const bool inside_block = std::any_of(blocks.begin(), blocks.end(), [&](const auto& blk) {
            return nd.x > blk.first + 1e-15 && nd.x < blk.second - 1e-15;
        });
        if (inside_block) {
            continue;
        }
        if (!merged.empty() && nd.x - merged.back().x <= 1e-14) {
            merged.back().structural = merged.back().structural || nd.structural;
            continue;
        }
        merged.push_back(nd);
    }
    if (!F_.bounded() && !(F_.tail_index() > 1.0)) {
        // (1 - x) F^-1(x) does not vanish at x = 1; drop the endpoint.
        merged.pop_back();
    }

    auto H = [this](double x) {
        if (x >= 1.0) {
            return 0.0;
        }
        return -(1.0 - x) * F_.quantile_right(x);
    };
    std::vector<bool> structural;
    for (const auto& nd : merged) {
        x_.push_back(nd.x);
        h_.push_back(H(nd.x));
        structural.push_back(nd.structural);
    }
    const std::size_t m = x_.size();

    // Greatest convex minorant by monotone chain.
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < m; ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            if (cross(x_[a], h_[a], x_[b], h_[b], x_[i], h_[i]) <= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(i);
    }

    double scale = 1.0;
    for (double h : h_) {
        scale = std::max(scale, std::abs(h));
    }

    slopes_.assign(m - 1, 0.0);
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const std::size_t a = hull[s];
        const std::size_t b = hull[s + 1];
        const double slope = (h_[b] - h_[a]) / (x_[b] - x_[a]);
        double dev = 0.0;
        for (std::size_t j = a; j < b; ++j) {
            slopes_[j] = slope;
            if (j > a) {
                dev = std::max(dev, h_[j] - (h_[a] + slope * (x_[j] - x_[a])));
            }
        }
        if (b - a >= 2 && dev > 1e-10 * scale) {
            intervals_.push_back({0.0, 0.0, x_[a], x_[b], slope, b - a});
        }
    }

    // Refine interior endpoints: the minorant touches H where phi(F^-1(x))
    // equals the ironed level.
    auto phi_at = [this](double x) { return virtual_value(F_, F_.quantile(x)); };
    auto locate = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), x) - x_.begin());
    };
    auto refine_end = [&](double x_end, double level) -> double {
        const std::size_t i = locate(x_end);
        if (i >= m || x_[i] != x_end || structural[i] || i == 0 || i + 1 >= m) {
            return x_end;
        }
        const double lo = x_[i - 1];
        const double hi = x_[i + 1];
        try {
            double a = lo;
            double b = hi;
            double ga = phi_at(a) - level;
            const double gb = phi_at(b) - level;
            if (ga * gb > 0.0) {
                return x_end;
            }
            for (int it = 0; it < 100 && b - a > 1e-16; ++it) {
                const double mid = 0.5 * (a + b);
                const double gm = phi_at(mid) - level;
                if ((gm <= 0.0) == (ga <= 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        } catch (const DomainError&) {
            return x_end;
        }
    };
    for (auto& iv : intervals_) {
        const double x_lo0 = iv.x_lo;
        const double x_hi0 = iv.x_hi;
        double x_lo = x_lo0;
        double x_hi = x_hi0;
        double level = iv.value;
        for (int round = 0; round < 3; ++round) {
            x_lo = refine_end(x_lo0, level);
            x_hi = refine_end(x_hi0, level);
            level = (H(x_hi) - H(x_lo)) / (x_hi - x_lo);
        }
        iv.x_lo = x_lo;
        iv.x_hi = x_hi;
        iv.value = level;
        iv.v_lo = F_.quantile_right(x_lo);
        iv.v_hi = x_hi >= 1.0 ? F_.upper() : F_.quantile(x_hi);
        if (iv.cells < 4) {
            std::ostringstream os;
            os << "ironed interval [" << iv.v_lo << ", " << iv.v_hi << "] spans only " << iv.cells
               << " grid cells; refine the grid";
            warnings_.push_back(os.str());
        }
    }
}

double VirtualValueCurve::hull_slope_at(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t cell = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    cell = std::min(cell, slopes_.size() - 1);
    return slopes_[cell];
}

const IronedInterval* VirtualValueCurve::interval_containing(double v) const {
    for (const auto& iv : intervals_) {
        if (v >= iv.v_lo && v <= iv.v_hi) {
            return &iv;
        }
    }
    return nullptr;
}

bool VirtualValueCurve::is_ironed(double v) const { return interval_containing(v) != nullptr; }

double VirtualValueCurve::phi_bar(double v) const {
    if (v < F_.lower()) {
        v = F_.lower();
    }
    if (F_.bounded() && v > F_.upper()) {
        v = F_.upper();
    }
    if (const auto* iv = interval_containing(v)) {
        return iv->value;
    }
    if (F_.atom_mass_at(v) > 0.0) {
        return hull_slope_at(0.5 * (F_.cdf_left(v) + F_.cdf(v)));
    }
    const double f = F_.density(v);
    if (f > 0.0 && std::isfinite(f)) {
        return v - (1.0 - F_.cdf(v)) / f;
    }
    // Gap in the support: types here are never drawn; use the left edge.
    const double left = F_.quantile(F_.cdf(v));
    if (left < v) {
        return phi_bar(left);
    }
    return hull_slope_at(F_.cdf(v));
}

VirtualValueCurve iron(const ValueDistribution& F, std::size_t n_grid) { return VirtualValueCurve(F, n_grid); }

double exclusion_threshold(const VirtualValueCurve& curve) {
    const auto& F = curve.distribution();
    auto served = [&](double v) { return curve.phi_bar(v) > -1e-12; };
    const double lo0 = F.lower();
    if (served(lo0)) {
        return lo0;
    }
    double hi = F.upper();
    if (!std::isfinite(hi)) {
        hi = std::max(2.0, 2.0 * lo0);
        int guard = 0;
        while (!served(hi)) {
            hi *= 2.0;
            if (++guard > 1000) {
                return kInf;
            }
        }
    } else if (!served(hi)) {
        return kInf;
    }
    double lo = lo0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (served(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for (double b : F.breakpoints()) {
        if (std::abs(b - hi) <= 1e-12 * std::max(1.0, b)) {
            return b;
        }
    }
    for (const auto& iv : curve.ironed_intervals()) {
        if (std::abs(iv.v_lo - hi) <= 1e-12 * std::max(1.0, iv.v_lo)) {
            return iv.v_lo;
        }
    }
    return hi;
}

DirectMechanism bayes_optimal_mechanism(std::shared_ptr<const VirtualValueCurve> curve, const IsoElasticCost& cost) {
    if (!curve) {
        throw DomainError("bayes_optimal_mechanism: null curve");
    }
    const auto& F = curve->distribution();
    const double eta = cost.eta();
    if (F.tail_index() <= 1.0) {
        throw DomainError("bayes_optimal_mechanism: needs a finite mean");
    }
    const double threshold = exclusion_threshold(*curve);
    const double lower = F.lower();
    const double r = 1.0 / (eta - 1.0);
    Evaluator q = [curve, threshold, lower, r](double v) {
        if (v < lower || v < threshold) {
            return 0.0;
        }
        const double pb = curve->phi_bar(v);
        return pb <= 0.0 ? 0.0 : std::pow(pb, r);
    };
    std::vector<double> breakpoints = F.breakpoints();
    for (const auto& iv : curve->ironed_intervals()) {
        breakpoints.push_back(iv.v_lo);
        if (std::isfinite(iv.v_hi)) {
            breakpoints.push_back(iv.v_hi);
        }
    }
    if (std::isfinite(threshold)) {
        breakpoints.push_back(threshold);
    }
    return DirectMechanism("bayes_optimal[" + F.describe() + "]", q, breakpoints);
}

DirectMechanism bayes_optimal_mechanism(const ValueDistribution& F, const IsoElasticCost& cost, std::size_t n_grid) {
    return bayes_optimal_mechanism(std::make_shared<const VirtualValueCurve>(F, n_grid), cost);
}

Evaluator bayes_markup_curve(const ValueDistribution& F, const IsoElasticCost&, std::size_t n_grid) {
    auto curve = std::make_shared<const VirtualValueCurve>(F, n_grid);
    return [curve](double v) {
        if (curve->is_ironed(v)) {
            std::ostringstream os;
            os << "bayes_markup_curve: v=" << v << " lies in an ironed interval";
            throw DomainError(os.str());
        }
        const auto& d = curve->distribution();
        const double f = d.density(v);
        if (!(f > 0.0) || !(v > 0.0)) {
            throw DomainError("bayes_markup_curve: needs v > 0 with positive density");
        }
        return (1.0 - d.cdf(v)) / (f * v);
    };
}

void write_virtual_value_csv(std::ostream& os, const VirtualValueCurve& curve, const std::vector<double>& grid) {
    write_csv_row(os, std::vector<std::string>{"v", "phi", "phi_bar", "ironed"});
    for (double v : grid) {
        double phi = std::numeric_limits<double>::quiet_NaN();
        try {
            phi = curve.phi(v);
        } catch (const DomainError&) {
        }
        write_csv_row(os, std::vector<std::string>{format_double(v), format_double(phi),
                                                   format_double(curve.phi_bar(v)),
                                                   curve.is_ironed(v) ? "1" : "0"});
    }
}

}  // namespace markup
