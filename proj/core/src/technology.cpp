#include "markup/technology.hpp"

#include "markup/errors.hpp"
#include "markup/quadrature.hpp"
#include "markup/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace markup {

IsoElasticCost::IsoElasticCost(double eta) : eta_(eta) {
    if (!(eta > 1.0) || !std::isfinite(eta)) {
        throw DomainError("IsoElasticCost: eta must be finite and > 1");
    }
}

double IsoElasticCost::cost(double q) const { return std::pow(q, eta_) / eta_; }
double IsoElasticCost::marginal(double q) const { return std::pow(q, eta_ - 1.0); }
double IsoElasticCost::curvature(double q) const { return (eta_ - 1.0) * std::pow(q, eta_ - 2.0); }

double IsoElasticCost::elasticity(double q) const {
    if (!(q > 0.0)) {
        throw DomainError("elasticity: q must be > 0");
    }
    return eta_;
}

double IsoElasticCost::efficient_quality(double v) const {
    if (v < 0.0) {
        throw DomainError("efficient_quality: v must be >= 0");
    }
    return std::pow(v, 1.0 / (eta_ - 1.0));
}

double IsoElasticCost::efficient_surplus(double v) const {
    return (eta_ - 1.0) / eta_ * std::pow(v, eta_ / (eta_ - 1.0));
}

GeneralConvexCost::GeneralConvexCost(Fn c, Fn c1, Fn c2, double eta_bar, double q_min, double q_max)
    : c_(std::move(c)), c1_(std::move(c1)), c2_(std::move(c2)), eta_bar_(eta_bar), q_min_(q_min), q_max_(q_max) {
    if (!c_ || !c1_ || !c2_) {
        throw DomainError("GeneralConvexCost: c, c' and c'' evaluators are required");
    }
    if (!(eta_bar > 1.0)) {
        throw DomainError("GeneralConvexCost: eta_bar must be > 1");
    }
    if (!(q_min > 0.0 && q_max > q_min)) {
        throw DomainError("GeneralConvexCost: need 0 < q_min < q_max");
    }
}

GeneralConvexCost GeneralConvexCost::iso_elastic(double eta) {
    const IsoElasticCost iso(eta);
    GeneralConvexCost out([iso](double q) { return iso.cost(q); }, [iso](double q) { return iso.marginal(q); },
                          [iso](double q) { return iso.curvature(q); }, eta);
    out.iso_eta_ = eta;
    return out;
}

GeneralConvexCost GeneralConvexCost::polynomial(std::vector<double> coeffs, double eta_bar, double q_min,
                                                double q_max) {
    if (coeffs.size() < 2) {
        throw DomainError("poly_cost: need at least two coefficients");
    }
    if (coeffs[0] != 0.0) {
        throw DomainError("poly_cost: constant coefficient must be 0 so that c(0) = 0");
    }
    for (double a : coeffs) {
        if (!std::isfinite(a) || a < 0.0) {
            throw DomainError("poly_cost: coefficients must be finite and nonnegative");
        }
    }
    auto horner = [](const std::vector<double>& a, double q) {
        double acc = 0.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) {
            acc = acc * q + *it;
        }
        return acc;
    };
    std::vector<double> d1(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
        d1[i - 1] = static_cast<double>(i) * coeffs[i];
    }
    std::vector<double> d2(d1.size() > 1 ? d1.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < d1.size(); ++i) {
        d2[i - 1] = static_cast<double>(i) * d1[i];
    }
    return GeneralConvexCost([coeffs, horner](double q) { return horner(coeffs, q); },
                             [d1, horner](double q) { return horner(d1, q); },
                             [d2, horner](double q) { return horner(d2, q); }, eta_bar, q_min, q_max);
}

CostValidation GeneralConvexCost::validate() const {
    constexpr int n = 256;
    CostValidation report;
    report.min_third_derivative = std::numeric_limits<double>::infinity();
    double worst_q = q_min_;
    auto fail = [&](const std::string& msg) {
        report.ok = false;
        report.problems.push_back(msg);
    };
    if (std::abs(c_(0.0)) > 1e-14) {
        fail("c(0) != 0");
    }
    const double ratio = std::pow(q_max_ / q_min_, 1.0 / (n - 1));
    double prev_marginal = c1_(0.0);
    for (int i = 0; i < n; ++i) {
        const double q = q_min_ * std::pow(ratio, i);
        const double m = c1_(q);
        if (m < prev_marginal - 1e-12 * std::max(1.0, std::abs(prev_marginal))) {
            std::ostringstream os;
            os << "c' decreases near q=" << q;
            fail(os.str());
        }
        prev_marginal = m;

        const double e = c1_(q) * q / c_(q);
        report.max_elasticity = std::max(report.max_elasticity, e);
        if (e > eta_bar_ + 1e-8) {
            std::ostringstream os;
            os << "elasticity " << e << " exceeds eta_bar " << eta_bar_ << " at q=" << q;
            fail(os.str());
        }

        // c''' by central differences of c''.
        const double h = 1e-4 * q;
        const double c3 = (c2_(q + h) - c2_(q - h)) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(c2_(q)) / q);
        if (c3 < report.min_third_derivative) {
            report.min_third_derivative = c3;
            worst_q = q;
        }
        if (c3 < -1e-6 * scale) {
            report.third_derivative_ok = false;
        }
    }
    if (!report.third_derivative_ok) {
        std::ostringstream os;
        os << "c''' < 0 (min " << report.min_third_derivative << " at q=" << worst_q << ")";
        fail(os.str());
    }
    return report;
}

double pointwise_elasticity(const GeneralConvexCost& cost, double q) {
    if (!(q > 0.0)) {
        throw DomainError("pointwise_elasticity: q must be > 0");
    }
    if (cost.iso_eta()) {
        return *cost.iso_eta();
    }
    const double c = cost.cost(q);
    if (!(c > 0.0)) {
        throw DomainError("pointwise_elasticity: c(q) must be > 0");
    }
    return cost.marginal(q) * q / c;
}

double pointwise_elasticity(const IsoElasticCost& cost, double q) { return cost.elasticity(q); }

double efficient_quality(double v, const IsoElasticCost& cost) { return cost.efficient_quality(v); }

double efficient_quality(double v, const GeneralConvexCost& cost) {
    if (v < 0.0) {
        throw DomainError("efficient_quality: v must be >= 0");
    }
    if (cost.iso_eta()) {
        return std::pow(v, 1.0 / (*cost.iso_eta() - 1.0));
    }
    if (v <= cost.marginal(0.0)) {
        return 0.0;
    }
    auto g = [&](double q) { return cost.marginal(q); };
    const auto hi = bracket_above(g, v, std::max(1e-3, std::min(1.0, v)));
    if (!hi) {
        throw ConvergenceError("efficient_quality: c' never reaches v on the search interval");
    }
    return solve_monotone(g, v, 0.0, *hi, [&](double q) { return cost.curvature(q); });
}

SeparableQuantityUtility::SeparableQuantityUtility(double eta) : eta_(eta) {
    if (!(eta < -1.0) || !std::isfinite(eta)) {
        throw DomainError("SeparableQuantityUtility: eta must be finite and < -1");
    }
}

double SeparableQuantityUtility::utility(double v, double q) const {
    return v * (eta_ / (eta_ + 1.0)) * std::pow(q, (eta_ + 1.0) / eta_);
}

double SeparableQuantityUtility::marginal_utility(double v, double q) const {
    return v * std::pow(q, 1.0 / eta_);
}

double SeparableQuantityUtility::demand(double v, double p) const {
    if (!(p > 0.0)) {
        throw DomainError("demand: p must be > 0");
    }
    return std::pow(p / v, eta_);
}

double SeparableQuantityUtility::efficient_surplus(double v) const {
    return std::pow(v, -eta_) / (-eta_ - 1.0);
}

NonlinearDemandModel::NonlinearDemandModel(Fn2 marginal_utility, double eta_bar, Fn2 demand, Fn2 elasticity,
                                           std::string label)
    : h_q_(std::move(marginal_utility)),
      eta_bar_(eta_bar),
      demand_(std::move(demand)),
      elasticity_(std::move(elasticity)),
      label_(std::move(label)) {
    if (!(eta_bar < -1.0)) {
        throw DomainError("NonlinearDemandModel: eta_bar must be < -1");
    }
    if (!h_q_ && !demand_) {
        throw DomainError("NonlinearDemandModel: need a marginal utility or a demand evaluator");
    }
    if (!h_q_) {
        // h_q(v, q) is the price at which D(v, p) = q.
        h_q_ = [d = demand_](double v, double q) {
            auto g = [&](double p) { return -d(v, p); };
            double lo = 1.0;
            while (-g(lo) < q) {
                lo *= 0.5;
                if (lo < 1e-300) {
                    throw ConvergenceError("marginal_utility: demand never reaches q");
                }
            }
            const auto hi = bracket_above(g, -q, std::max(lo, 1.0));
            if (!hi) {
                throw ConvergenceError("marginal_utility: demand never falls to q");
            }
            return solve_monotone(g, -q, lo, *hi);
        };
    }
}

NonlinearDemandModel NonlinearDemandModel::from_separable(const SeparableQuantityUtility& u) {
    return NonlinearDemandModel([u](double v, double q) { return u.marginal_utility(v, q); }, u.eta(),
                                [u](double v, double p) { return u.demand(v, p); },
                                [u](double, double) { return u.eta(); }, "separable");
}

NonlinearDemandModel NonlinearDemandModel::drifting_elasticity(double eta_bar) {
    if (!(eta_bar < -1.0)) {
        throw DomainError("drifting_elasticity: eta_bar must be < -1");
    }
    auto d = [eta_bar](double v, double p) {
        if (!(p > 0.0) || !(v > 0.0)) {
            throw DomainError("drifting demand: need v > 0 and p > 0");
        }
        const double base = std::pow(v, -eta_bar);
        if (p < 1.0) {
            return base * std::pow(p, eta_bar);
        }
        const double lambda = 1.0 + v;
        const double drift = -std::expm1(-lambda * std::log(p)) / lambda;
        return base * std::pow(p, eta_bar - 1.0) * std::exp(drift);
    };
    auto e = [eta_bar](double v, double p) {
        if (p < 1.0) {
            return eta_bar;
        }
        return eta_bar - 1.0 + std::pow(p, -(1.0 + v));
    };
    return NonlinearDemandModel({}, eta_bar, d, e, "drifting");
}

double NonlinearDemandModel::demand(double v, double p) const {
    if (!(p > 0.0)) {
        throw DomainError("demand: p must be > 0");
    }
    if (demand_) {
        return demand_(v, p);
    }
    return demand_by_inversion(v, p);
}

double NonlinearDemandModel::demand_by_inversion(double v, double p) const {
    if (!(p > 0.0)) {
        throw DomainError("demand: p must be > 0");
    }
    // h_q decreasing in q, so -h_q is increasing.
    auto g = [&](double q) { return -h_q_(v, q); };
    double lo = 1.0;
    int guard = 0;
    while (g(lo) > -p) {
        lo *= 0.5;
        if (++guard > 2000) {
            throw ConvergenceError("demand: marginal utility never exceeds p");
        }
    }
    const auto hi = bracket_above(g, -p, std::max(lo, 1.0));
    if (!hi) {
        throw ConvergenceError("demand: marginal utility never falls to p");
    }
    return solve_monotone(g, -p, lo, *hi);
}

double NonlinearDemandModel::numeric_elasticity(double v, double p) const {
    const double h = std::max(1e-6, 1e-6 * p);
    const double up = demand(v, p + h);
    const double dn = demand(v, p - h);
    return (up - dn) / (2.0 * h) * p / demand(v, p);
}

double NonlinearDemandModel::demand_elasticity(double v, double p) const {
    if (elasticity_) {
        return elasticity_(v, p);
    }
    return numeric_elasticity(v, p);
}

double NonlinearDemandModel::efficient_surplus(double v) const {
    return integrate_to_infinity([&](double p) { return demand(v, p); }, 1.0).value;
}

NonlinearDemandModel::BandCheck NonlinearDemandModel::check_band(const std::vector<double>& values,
                                                                 const std::vector<double>& prices) const {
    BandCheck out;
    out.min_elasticity = std::numeric_limits<double>::infinity();
    out.max_elasticity = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        double prev = std::numeric_limits<double>::infinity();
        for (double p : prices) {
            if (p < 1.0) {
                continue;
            }
            const double e = demand_elasticity(v, p);
            out.min_elasticity = std::min(out.min_elasticity, e);
            out.max_elasticity = std::max(out.max_elasticity, e);
            if (std::isfinite(prev)) {
                out.max_increase = std::max(out.max_increase, e - prev);
            }
            prev = e;
            if (!(e < 0.0) || e < eta_bar_ - 1.0 - 1e-9 || e > eta_bar_ + 1e-9) {
                out.ok = false;
            }
        }
    }
    if (out.max_increase > 1e-7) {
        out.ok = false;
    }
    return out;
}

double demand(const NonlinearDemandModel& model, double v, double p) { return model.demand(v, p); }

double demand_elasticity(const NonlinearDemandModel& model, double v, double p) {
    return model.demand_elasticity(v, p);
}

}  // namespace markup
