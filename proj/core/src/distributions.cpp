#include "markup/distributions.hpp"

#include "markup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace markup {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw DomainError(msg);
    }
}

double discrete_cdf(const std::vector<Atom>& atoms, double v, bool left) {
    double acc = 0.0;
    for (const auto& a : atoms) {
        if (left ? a.location < v : a.location <= v) {
            acc += a.mass;
        } else {
            break;
        }
    }
    return std::min(acc, 1.0);
}

double discrete_quantile(const std::vector<Atom>& atoms, double x, bool right) {
    double acc = 0.0;
    for (const auto& a : atoms) {
        acc += a.mass;
        if (right ? acc > x + 1e-15 : acc >= x - 1e-15) {
            return a.location;
        }
    }
    return atoms.back().location;
}

}  // namespace

ValueDistribution::ValueDistribution(Params params) : params_(std::move(params)) { finalize(); }

ValueDistribution ValueDistribution::truncated_pareto(double alpha, double k) {
    require(alpha > 0.0 && std::isfinite(alpha), "truncated_pareto: alpha must be > 0");
    require(k > 1.0 && std::isfinite(k), "truncated_pareto: truncation point k must be > 1");
    return ValueDistribution(dist::TruncatedPareto{alpha, k});
}

ValueDistribution ValueDistribution::pareto(double alpha) {
    require(alpha > 0.0 && std::isfinite(alpha), "pareto: alpha must be > 0");
    return ValueDistribution(dist::Pareto{alpha});
}

ValueDistribution ValueDistribution::uniform(double a, double b) {
    require(a >= 0.0 && a < b && std::isfinite(b), "uniform: need 0 <= a < b < inf");
    return ValueDistribution(dist::Uniform{a, b});
}

ValueDistribution ValueDistribution::binary(double v_lo, double v_hi, double p_hi) {
    require(v_lo >= 0.0 && v_lo < v_hi && std::isfinite(v_hi), "binary: need 0 <= v_lo < v_hi");
    require(p_hi >= 0.0 && p_hi <= 1.0, "binary: p_hi must lie in [0, 1]");
    return ValueDistribution(dist::Binary{v_lo, v_hi, p_hi});
}

ValueDistribution ValueDistribution::power(double alpha) {
    require(alpha > 0.0 && std::isfinite(alpha), "power: alpha must be > 0");
    return ValueDistribution(dist::Power{alpha});
}

ValueDistribution ValueDistribution::discrete(std::vector<double> values, std::vector<double> masses) {
    require(!values.empty() && values.size() == masses.size(),
            "discrete: values and masses must be non-empty and equally long");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(values[i] >= 0.0 && std::isfinite(values[i]), "discrete: values must be finite and >= 0");
        require(i == 0 || values[i] > values[i - 1], "discrete: values must be strictly ascending");
        require(masses[i] >= 0.0, "discrete: masses must be nonnegative");
        total += masses[i];
    }
    require(std::abs(total - 1.0) <= 1e-12, "discrete: masses must sum to 1 within 1e-12");
    return ValueDistribution(dist::Discrete{std::move(values), std::move(masses)});
}

ValueDistribution ValueDistribution::point_mass(double v0) {
    require(v0 >= 0.0 && std::isfinite(v0), "point_mass: v0 must be finite and >= 0");
    return ValueDistribution(dist::PointMass{v0});
}

ValueDistribution ValueDistribution::mixture(std::vector<ValueDistribution> components,
                                             std::vector<double> weights) {
    require(!components.empty() && components.size() == weights.size(),
            "mixture: components and weights must be non-empty and equally long");
    double total = 0.0;
    for (double w : weights) {
        require(w > 0.0, "mixture: weights must be positive");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "mixture: weights must sum to 1 within 1e-12");
    return ValueDistribution(dist::Mixture{std::move(components), std::move(weights)});
}

ValueDistribution::Kind ValueDistribution::kind() const {
    return static_cast<Kind>(params_.index());
}

bool ValueDistribution::bounded() const { return std::isfinite(upper_); }

void ValueDistribution::finalize() {
    atoms_.clear();
    breakpoints_.clear();
    std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) {
                lower_ = 1.0;
                upper_ = p.k;
                atoms_.push_back({p.k, std::pow(p.k, -p.alpha)});
                breakpoints_ = {1.0, p.k};
            },
            [&](const dist::Pareto&) {
                lower_ = 1.0;
                upper_ = kInf;
                breakpoints_ = {1.0};
            },
            [&](const dist::Uniform& p) {
                lower_ = p.a;
                upper_ = p.b;
                breakpoints_ = {p.a, p.b};
            },
            [&](const dist::Binary& p) {
                if (p.p_hi < 1.0) {
                    atoms_.push_back({p.v_lo, 1.0 - p.p_hi});
                }
                if (p.p_hi > 0.0) {
                    atoms_.push_back({p.v_hi, p.p_hi});
                }
            },
            [&](const dist::Power&) {
                lower_ = 0.0;
                upper_ = 1.0;
                breakpoints_ = {0.0, 1.0};
            },
            [&](const dist::Discrete& p) {
                for (std::size_t i = 0; i < p.values.size(); ++i) {
                    if (p.masses[i] > 0.0) {
                        atoms_.push_back({p.values[i], p.masses[i]});
                    }
                }
            },
            [&](const dist::PointMass& p) { atoms_.push_back({p.v0, 1.0}); },
            [&](const dist::Mixture& p) {
                lower_ = kInf;
                upper_ = 0.0;
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    const auto& c = p.components[i];
                    lower_ = std::min(lower_, c.lower());
                    upper_ = std::max(upper_, c.upper());
                    for (const auto& a : c.atoms()) {
                        atoms_.push_back({a.location, a.mass * p.weights[i]});
                    }
                    breakpoints_.insert(breakpoints_.end(), c.breakpoints().begin(), c.breakpoints().end());
                }
                std::sort(atoms_.begin(), atoms_.end(),
                          [](const Atom& x, const Atom& y) { return x.location < y.location; });
                std::vector<Atom> merged;
                for (const auto& a : atoms_) {
                    if (!merged.empty() && merged.back().location == a.location) {
                        merged.back().mass += a.mass;
                    } else {
                        merged.push_back(a);
                    }
                }
                atoms_ = std::move(merged);
            },
        },
        params_);

    const bool purely_atomic = std::holds_alternative<dist::Binary>(params_) ||
                               std::holds_alternative<dist::Discrete>(params_) ||
                               std::holds_alternative<dist::PointMass>(params_);
    if (purely_atomic) {
        lower_ = atoms_.front().location;
        upper_ = atoms_.back().location;
    }
    for (const auto& a : atoms_) {
        breakpoints_.push_back(a.location);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    breakpoints_.erase(std::remove_if(breakpoints_.begin(), breakpoints_.end(),
                                      [](double b) { return !std::isfinite(b); }),
                       breakpoints_.end());
}

double ValueDistribution::cdf(double v) const {
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) -> double {
                if (v < 1.0) return 0.0;
                if (v >= p.k) return 1.0;
                return -std::expm1(-p.alpha * std::log(v));
            },
            [&](const dist::Pareto& p) -> double {
                if (v < 1.0) return 0.0;
                return -std::expm1(-p.alpha * std::log(v));
            },
            [&](const dist::Uniform& p) -> double {
                if (v <= p.a) return 0.0;
                if (v >= p.b) return 1.0;
                return (v - p.a) / (p.b - p.a);
            },
            [&](const dist::Power& p) -> double {
                if (v <= 0.0) return 0.0;
                if (v >= 1.0) return 1.0;
                return std::pow(v, p.alpha);
            },
            [&](const dist::Mixture& p) -> double {
                double acc = 0.0;
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    acc += p.weights[i] * p.components[i].cdf(v);
                }
                return std::min(acc, 1.0);
            },
            [&](const auto&) -> double { return discrete_cdf(atoms_, v, false); },
        },
        params_);
}

double ValueDistribution::cdf_left(double v) const {
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) -> double {
                if (v <= 1.0) return 0.0;
                if (v > p.k) return 1.0;
                return -std::expm1(-p.alpha * std::log(v));
            },
            [&](const dist::Mixture& p) -> double {
                double acc = 0.0;
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    acc += p.weights[i] * p.components[i].cdf_left(v);
                }
                return std::min(acc, 1.0);
            },
            [&](const dist::Binary&) -> double { return discrete_cdf(atoms_, v, true); },
            [&](const dist::Discrete&) -> double { return discrete_cdf(atoms_, v, true); },
            [&](const dist::PointMass&) -> double { return discrete_cdf(atoms_, v, true); },
            [&](const auto&) -> double { return cdf(v); },
        },
        params_);
}

double ValueDistribution::density(double v) const {
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) -> double {
                if (v < 1.0 || v >= p.k) return 0.0;
                return p.alpha * std::pow(v, -p.alpha - 1.0);
            },
            [&](const dist::Pareto& p) -> double {
                if (v < 1.0) return 0.0;
                return p.alpha * std::pow(v, -p.alpha - 1.0);
            },
            [&](const dist::Uniform& p) -> double {
                if (v < p.a || v > p.b) return 0.0;
                return 1.0 / (p.b - p.a);
            },
            [&](const dist::Power& p) -> double {
                if (v < 0.0 || v > 1.0) return 0.0;
                if (v == 0.0) {
                    return p.alpha == 1.0 ? 1.0 : (p.alpha > 1.0 ? 0.0 : kInf);
                }
                return p.alpha * std::pow(v, p.alpha - 1.0);
            },
            [&](const dist::Mixture& p) -> double {
                double acc = 0.0;
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    acc += p.weights[i] * p.components[i].density(v);
                }
                return acc;
            },
            [&](const auto&) -> double { return 0.0; },
        },
        params_);
}

double ValueDistribution::atom_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) {
        m += a.mass;
    }
    return m;
}

double ValueDistribution::atom_mass_at(double v) const {
    for (const auto& a : atoms_) {
        if (a.location == v) {
            return a.mass;
        }
    }
    return 0.0;
}

double ValueDistribution::quantile(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) -> double {
                const double top = 1.0 - std::pow(p.k, -p.alpha);
                if (x > top) return p.k;
                return std::min(p.k, std::exp(-std::log1p(-x) / p.alpha));
            },
            [&](const dist::Pareto& p) -> double {
                if (x >= 1.0) return kInf;
                return std::exp(-std::log1p(-x) / p.alpha);
            },
            [&](const dist::Uniform& p) -> double { return p.a + x * (p.b - p.a); },
            [&](const dist::Power& p) -> double { return std::pow(x, 1.0 / p.alpha); },
            [&](const dist::Mixture&) -> double {
                for (const auto& a : atoms_) {
                    if (cdf_left(a.location) < x && x <= cdf(a.location)) {
                        return a.location;
                    }
                }
                if (x <= 0.0) return lower_;
                double lo = lower_;
                double hi = std::isfinite(upper_) ? upper_ : std::max(2.0, 2.0 * lower_);
                while (cdf(hi) < x) {
                    lo = hi;
                    hi *= 2.0;
                    if (!std::isfinite(hi)) return kInf;
                }
                for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (cdf(mid) >= x) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                for (double b : breakpoints_) {
                    if (std::abs(b - hi) <= 1e-12 * std::max(1.0, b)) return b;
                }
                return hi;
            },
            [&](const auto&) -> double { return discrete_quantile(atoms_, x, false); },
        },
        params_);
}

double ValueDistribution::quantile_right(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& p) -> double {
                const double top = 1.0 - std::pow(p.k, -p.alpha);
                if (x >= top) return p.k;
                return std::min(p.k, std::exp(-std::log1p(-x) / p.alpha));
            },
            [&](const dist::Mixture&) -> double {
                if (x >= 1.0) return upper_;
                double lo = lower_;
                double hi = std::isfinite(upper_) ? upper_ : std::max(2.0, 2.0 * lower_);
                while (cdf(hi) <= x) {
                    lo = hi;
                    hi *= 2.0;
                    if (!std::isfinite(hi)) return kInf;
                }
                if (cdf(lo) > x) return lo;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (cdf(mid) > x) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                for (double b : breakpoints_) {
                    if (std::abs(b - hi) <= 1e-12 * std::max(1.0, b)) return b;
                }
                return hi;
            },
            [&](const dist::Binary&) -> double { return discrete_quantile(atoms_, x, true); },
            [&](const dist::Discrete&) -> double { return discrete_quantile(atoms_, x, true); },
            [&](const dist::PointMass&) -> double { return discrete_quantile(atoms_, x, true); },
            [&](const auto&) -> double { return quantile(x); },
        },
        params_);
}

std::optional<double> ValueDistribution::power_moment(double p) const {
    return std::visit(
        overloaded{
            [&](const dist::TruncatedPareto& d) -> std::optional<double> {
                const double tail = std::pow(d.k, p - d.alpha);
                if (std::abs(p - d.alpha) < 1e-12) {
                    return d.alpha * std::log(d.k) + 1.0;
                }
                // alpha * (k^(p-alpha) - 1) / (p - alpha), via expm1 for accuracy near p = alpha
                const double body = d.alpha * std::expm1((p - d.alpha) * std::log(d.k)) / (p - d.alpha);
                return body + tail;
            },
            [&](const dist::Pareto& d) -> std::optional<double> {
                if (d.alpha <= p) return kInf;
                return d.alpha / (d.alpha - p);
            },
            [&](const dist::Uniform& d) -> std::optional<double> {
                if (p <= -1.0) return std::nullopt;
                return (std::pow(d.b, p + 1.0) - std::pow(d.a, p + 1.0)) / ((p + 1.0) * (d.b - d.a));
            },
            [&](const dist::Power& d) -> std::optional<double> {
                if (d.alpha + p <= 0.0) return kInf;
                return d.alpha / (d.alpha + p);
            },
            [&](const dist::Mixture& d) -> std::optional<double> {
                double acc = 0.0;
                for (std::size_t i = 0; i < d.components.size(); ++i) {
                    auto m = d.components[i].power_moment(p);
                    if (!m) return std::nullopt;
                    acc += d.weights[i] * *m;
                }
                return acc;
            },
            [&](const auto&) -> std::optional<double> {
                double acc = 0.0;
                for (const auto& a : atoms_) {
                    acc += a.mass * std::pow(a.location, p);
                }
                return acc;
            },
        },
        params_);
}

double ValueDistribution::tail_index() const {
    return std::visit(overloaded{
                          [](const dist::Pareto& p) -> double { return p.alpha; },
                          [](const dist::Mixture& p) -> double {
                              double a = kInf;
                              for (const auto& c : p.components) {
                                  a = std::min(a, c.tail_index());
                              }
                              return a;
                          },
                          [](const auto&) -> double { return kInf; },
                      },
                      params_);
}

std::string ValueDistribution::describe() const {
    return std::visit(
        overloaded{
            [](const dist::TruncatedPareto& p) {
                return "truncated_pareto(alpha=" + fmt_num(p.alpha) + ",k=" + fmt_num(p.k) + ")";
            },
            [](const dist::Pareto& p) { return "pareto(alpha=" + fmt_num(p.alpha) + ")"; },
            [](const dist::Uniform& p) { return "uniform(a=" + fmt_num(p.a) + ",b=" + fmt_num(p.b) + ")"; },
            [](const dist::Binary& p) {
                return "binary(v_lo=" + fmt_num(p.v_lo) + ",v_hi=" + fmt_num(p.v_hi) +
                       ",p_hi=" + fmt_num(p.p_hi) + ")";
            },
            [](const dist::Power& p) { return "power(alpha=" + fmt_num(p.alpha) + ")"; },
            [](const dist::Discrete& p) { return "discrete(n=" + std::to_string(p.values.size()) + ")"; },
            [](const dist::PointMass& p) { return "point_mass(v0=" + fmt_num(p.v0) + ")"; },
            [](const dist::Mixture& p) {
                std::string s = "mixture(";
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    if (i) s += ";";
                    s += fmt_num(p.weights[i]) + "*" + p.components[i].describe();
                }
                return s + ")";
            },
        },
        params_);
}

bool tail_condition(const ValueDistribution& d, double eta) {
    if (!(eta > 1.0)) {
        throw DomainError("tail_condition: eta must be > 1");
    }
    if (d.bounded()) {
        return true;
    }
    // (1 - F(v)) v^(eta/(eta-1)) -> 0 iff the Pareto tail index exceeds eta/(eta-1).
    return d.tail_index() > eta / (eta - 1.0);
}

bool at_finiteness_boundary(const ValueDistribution& d, double eta) {
    if (!(eta > 1.0)) {
        throw DomainError("at_finiteness_boundary: eta must be > 1");
    }
    if (d.bounded()) {
        return false;
    }
    const double boundary = eta / (eta - 1.0);
    return std::abs(d.tail_index() - boundary) <= 1e-12 * boundary;
}

ValueDistribution minimax_distribution(double eta) {
    if (!(eta > 1.0)) {
        throw DomainError("minimax_distribution: eta must be > 1");
    }
    return ValueDistribution::pareto(eta / (eta - 1.0));
}

ValueDistribution truncate(const ValueDistribution& d, double k) {
    if (d.bounded()) {
        return d;
    }
    if (const auto* p = std::get_if<dist::Pareto>(&d.params())) {
        return ValueDistribution::truncated_pareto(p->alpha, k);
    }
    if (const auto* m = std::get_if<dist::Mixture>(&d.params())) {
        std::vector<ValueDistribution> parts;
        for (const auto& c : m->components) {
            parts.push_back(truncate(c, k));
        }
        return ValueDistribution::mixture(std::move(parts), m->weights);
    }
    throw DomainError("truncate: unsupported distribution " + d.describe());
}

double cdf(const ValueDistribution& d, double v) { return d.cdf(v); }

DensityAndAtoms density_or_mass(const ValueDistribution& d, double v) {
    return {d.density(v), d.atoms()};
}

}  // namespace markup
