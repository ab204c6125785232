#include "markup/guarantees.hpp"

#include "markup/errors.hpp"
#include "markup/mechanisms.hpp"
#include "markup/roots.hpp"
#include "markup/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace markup {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

GuaranteeCertificate make_certificate(std::string claim_id, std::vector<std::pair<std::string, double>> parameters,
                                      std::string subject, Sense sense, double bound, double measured,
                                      double tolerance) {
    GuaranteeCertificate c;
    c.claim_id = std::move(claim_id);
    c.parameters = std::move(parameters);
    c.subject = std::move(subject);
    c.sense = sense;
    c.bound_value = bound;
    c.measured_value = measured;
    c.tolerance = tolerance;
    switch (sense) {
        case Sense::at_least:
            c.slack = measured - bound;
            break;
        case Sense::at_most:
            c.slack = bound - measured;
            break;
        case Sense::equal:
            c.slack = -std::abs(measured - bound);
            break;
    }
    c.pass = c.slack >= -tolerance;
    return c;
}

const char* to_string(Sense s) {
    switch (s) {
        case Sense::at_least:
            return ">=";
        case Sense::at_most:
            return "<=";
        case Sense::equal:
            return "==";
    }
    return "?";
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::upper:
            return "upper";
        case Branch::lower:
            return "lower";
        case Branch::zero_cs:
            return "zero_cs";
    }
    return "?";
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::interior:
            return "interior";
        case Membership::boundary:
            return "boundary";
        case Membership::exterior:
            return "exterior";
    }
    return "?";
}

FrontierPoint eta2_boundary(double alpha) {
    if (!(alpha >= 1.0)) {
        throw DomainError("eta2_boundary: alpha must be >= 1");
    }
    if (std::isinf(alpha)) {
        return {1.0, 0.0, alpha, Branch::upper};
    }
    if (alpha >= 2.0) {
        const double c = (alpha - 1.0) / alpha;
        return {c * c, 2.0 * (alpha - 1.0) / (alpha * alpha), alpha, Branch::upper};
    }
    return {1.0 / (2.0 * alpha), (alpha - 1.0) / alpha, alpha, Branch::lower};
}

std::vector<FrontierPoint> eta2_zero_cs_segment(std::size_t n) {
    std::vector<FrontierPoint> out;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == 0) {
            out.push_back({1.0, 0.0, 1.0, Branch::zero_cs});
            continue;
        }
        const double k = std::pow(10.0, 12.0 * static_cast<double>(j) / static_cast<double>(n - 1));
        const RatioPair r = truncated_pareto_eta2(1.0, k);
        out.push_back({r.pi_over_s, r.u_over_s, 1.0, Branch::zero_cs});
    }
    return out;
}

Membership eta2_membership(double x, double y, double tol) {
    const double g[] = {x, x + 2.0 * y - 1.0, 2.0 * (std::sqrt(std::max(y, 0.0)) - y) - x, 1.0 - y};
    bool on_edge = false;
    for (double gi : g) {
        if (gi < -tol) {
            return Membership::exterior;
        }
        if (gi <= tol) {
            on_edge = true;
        }
    }
    return on_edge ? Membership::boundary : Membership::interior;
}

std::optional<Eta2Witness> eta2_witness(double x, double y, double tol) {
    if (eta2_membership(x, y, tol) == Membership::exterior) {
        return std::nullopt;
    }
    // alpha = 1 + s^2, k = 1 + e^w.
    auto point = [](double s, double w) {
        const double alpha = 1.0 + s * s;
        const double k = 1.0 + std::exp(w);
        return std::pair{alpha, k};
    };
    auto dist = [&](double s, double w) {
        const auto [alpha, k] = point(s, w);
        const RatioPair r = truncated_pareto_eta2(alpha, k);
        return std::hypot(r.u_over_s - x, r.pi_over_s - y);
    };
    constexpr double s_max = 15.0;
    constexpr double w_lo = -10.0;
    constexpr double w_hi = 35.0;
    constexpr int n = 60;
    double best_s = 0.0;
    double best_w = 0.0;
    double best = kInf;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double s = s_max * i / n;
            const double w = w_lo + (w_hi - w_lo) * j / n;
            const double d = dist(s, w);
            if (d < best) {
                best = d;
                best_s = s;
                best_w = w;
            }
        }
    }
    double ds = s_max / n;
    double dw = (w_hi - w_lo) / n;
    for (int it = 0; it < 5000 && best > tol && (ds > 1e-14 || dw > 1e-14); ++it) {
        bool moved = false;
        const double cand[4][2] = {{best_s + ds, best_w}, {best_s - ds, best_w}, {best_s, best_w + dw}, {best_s, best_w - dw}};
        for (const auto& c : cand) {
            const double s = std::clamp(c[0], 0.0, s_max);
            const double w = std::clamp(c[1], w_lo, w_hi);
            const double d = dist(s, w);
            if (d < best) {
                best = d;
                best_s = s;
                best_w = w;
                moved = true;
            }
        }
        if (!moved) {
            ds *= 0.5;
            dw *= 0.5;
        }
    }
    if (best > tol) {
        return std::nullopt;
    }
    const auto [alpha, k] = point(best_s, best_w);
    const RatioPair r = truncated_pareto_eta2(alpha, k);
    return Eta2Witness{alpha, k, r.u_over_s, r.pi_over_s, best};
}

std::vector<FrontierPoint> frontier_sweep(double eta, std::size_t n) {
    const double lo = frontier_beta_min(eta);
    std::vector<FrontierPoint> out;
    for (std::size_t j = 0; j < n; ++j) {
        const double beta = n == 1 ? lo : lo + (1.0 - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
        out.push_back({beta, frontier(beta, eta), frontier_attaining_shape(beta, eta), Branch::upper});
    }
    return out;
}

BayesOutcome bayes_outcome(const ValueDistribution& F, double eta, const FunctionalOptions& opts,
                           std::size_t n_grid) {
    const IsoElasticCost cost(eta);
    const ValueDistribution G = prepare_distribution(F, eta, opts);
    auto curve = std::make_shared<const VirtualValueCurve>(G, n_grid);
    const DirectMechanism M = bayes_optimal_mechanism(curve, cost);
    FunctionalOptions inner = opts;
    inner.truncation_k.reset();
    return {full_report(G, M, cost, inner), curve->warnings()};
}

std::vector<GuaranteeCertificate> verify_guarantee_mechanism(const ValueDistribution& F, double eta, double tol,
                                                             const FunctionalOptions& opts) {
    const SurplusReport r = full_report(F, guarantee_mechanism(eta), IsoElasticCost(eta), opts);
    return {make_certificate("guarantee.profit_ratio", {{"eta", eta}}, r.distribution, Sense::equal,
                             guarantee_ratio(eta), r.pi_ratio, tol),
            make_certificate("guarantee.consumer_share", {{"eta", eta}}, r.distribution, Sense::equal,
                             consumer_share(eta), r.u_ratio, tol)};
}

GuaranteeCertificate holder_audit(const SurplusReport& r, double eta, double tol) {
    if (!(eta > 1.0)) {
        throw DomainError("holder_audit: eta must be > 1");
    }
    const double beta = std::clamp(r.pi_ratio, 0.0, 1.0);
    const double bound = eta / (eta - 1.0) * (std::pow(beta, 1.0 / eta) - beta);
    return make_certificate("holder.frontier", {{"eta", eta}, {"beta", r.pi_ratio}}, r.distribution, Sense::at_most,
                            bound, r.u_ratio, tol);
}

GuaranteeCertificate holder_audit(const ValueDistribution& F, double eta, double tol, const FunctionalOptions& opts) {
    return holder_audit(bayes_outcome(F, eta, opts).report, eta, tol);
}

GuaranteeCertificate verify_surplus_lower_bound(const SurplusReport& r, double eta, double tol) {
    return make_certificate("lower_bound.total_surplus", {{"eta", eta}}, r.distribution, Sense::at_least,
                            surplus_lower_bound(eta), r.u_ratio + r.pi_ratio, tol);
}

GuaranteeCertificate verify_lower_bound_combination(const SurplusReport& r, double eta, double tol) {
    if (!(eta > 1.0)) {
        throw DomainError("verify_lower_bound_combination: eta must be > 1");
    }
    const double d = 2.0 * eta - 1.0;
    const double measured = (eta - 1.0) / d * r.u_ratio + eta / d * r.pi_ratio;
    return make_certificate("lower_bound.combination", {{"eta", eta}}, r.distribution, Sense::at_least, 1.0 / d,
                            measured, tol);
}

GuaranteeCertificate verify_convex_cost(const ValueDistribution& F, const GeneralConvexCost& cost, double tol,
                                        const FunctionalOptions& opts) {
    const MarkupMechanism mm = constant_markup_mechanism(cost);
    const SurplusReport r = full_report(F, mm.mechanism, cost, opts);
    return make_certificate("convex_cost.profit", {{"eta_bar", cost.eta_bar()}, {"z", mm.z}}, r.distribution,
                            Sense::at_least, convex_cost_guarantee(cost.eta_bar()), r.pi_ratio, tol);
}

GuaranteeCertificate compare_convex_bounds(double eta_bar) {
    return make_certificate("convex_cost.comparison", {{"eta_bar", eta_bar}}, "closed forms", Sense::at_most,
                            guarantee_ratio(eta_bar), convex_cost_guarantee(eta_bar), 1e-15);
}

std::vector<GuaranteeCertificate> verify_quantity_separable(const ValueDistribution& F, double eta_bar, double tol) {
    const SeparableQuantityUtility u(eta_bar);
    const UniformPriceMechanism up = uniform_price_mechanism(eta_bar);
    const NonlinearDemandModel model = NonlinearDemandModel::from_separable(u);
    const double share = quantity_guarantee(eta_bar);

    double worst = share;
    for (int i = 1; i <= 9; ++i) {
        const double v = F.quantile(0.1 * i);
        if (!(v > 0.0)) {
            continue;
        }
        const double ratio = up.profit(v, model) / u.efficient_surplus(v);
        if (std::abs(ratio - share) > std::abs(worst - share)) {
            worst = ratio;
        }
    }
    const Estimate pi = expectation(F, [&](double v) { return up.profit(v, model); });
    const Estimate s = expectation(F, [&](double v) { return std::pow(v, -eta_bar) / (-eta_bar - 1.0); });
    return {make_certificate("quantity.separable.pointwise", {{"eta_bar", eta_bar}, {"p_star", up.p_star}},
                             F.describe(), Sense::equal, share, worst, tol),
            make_certificate("quantity.separable.integrated", {{"eta_bar", eta_bar}, {"p_star", up.p_star}},
                             F.describe(), Sense::equal, share, pi.value / s.value, tol)};
}

std::vector<GuaranteeCertificate> verify_quantity_nonlinear(const ValueDistribution& F,
                                                            const NonlinearDemandModel& model,
                                                            const std::vector<double>& v_grid, double tol) {
    const double eta_bar = model.eta_bar();
    std::vector<double> prices;
    for (int i = 0; i < 64; ++i) {
        prices.push_back(std::pow(100.0, i / 63.0));
    }
    const auto band = model.check_band(v_grid, prices);
    if (!band.ok) {
        std::ostringstream os;
        os << "verify_quantity_nonlinear: elasticity band violated for " << model.label() << " (range ["
           << band.min_elasticity << ", " << band.max_elasticity << "], max increase " << band.max_increase << ")";
        throw DomainError(os.str());
    }
    const UniformPriceMechanism up = uniform_price_mechanism(eta_bar);
    const double share = quantity_guarantee(eta_bar);
    double worst = kInf;
    for (double v : v_grid) {
        worst = std::min(worst, up.profit(v, model) / model.efficient_surplus(v));
    }
    const Estimate pi = expectation(F, [&](double v) { return up.profit(v, model); });
    const Estimate s = expectation(F, [&](double v) { return model.efficient_surplus(v); });
    const std::vector<std::pair<std::string, double>> params{{"eta_bar", eta_bar}, {"p_star", up.p_star}};
    return {make_certificate("quantity.nonlinear.pointwise", params, model.label(), Sense::at_least, share, worst, tol),
            make_certificate("quantity.nonlinear.integrated", params, F.describe() + " " + model.label(),
                             Sense::at_least, share, pi.value / s.value, tol)};
}

std::vector<GuaranteeCertificate> verify_procurement_quality(double eta, const std::vector<double>& theta_grid,
                                                             double tol) {
    const ProcurementQuality offer = procurement_quality(eta);
    std::vector<GuaranteeCertificate> out;
    for (double theta : theta_grid) {
        if (!(theta > 0.0)) {
            throw DomainError("verify_procurement_quality: theta must be > 0");
        }
        // Seller best response to unit price p: p = theta q^(eta-1).
        auto marginal = [&](double q) { return theta * std::pow(q, eta - 1.0); };
        auto solve = [&](double target) {
            const auto hi = bracket_above(marginal, target, 1.0);
            if (!hi) {
                throw ConvergenceError("procurement: no best response");
            }
            return solve_monotone(marginal, target, 0.0, *hi);
        };
        const double q = solve(offer.unit_price);
        const double q_eff = solve(1.0);
        const double buyer = q - offer.unit_price * q;
        const double surplus = q_eff - theta * std::pow(q_eff, eta) / eta;
        out.push_back(make_certificate("procurement.quality", {{"eta", eta}, {"theta", theta}, {"p", offer.unit_price}},
                                       "theta=" + fmt(theta), Sense::equal, offer.share, buyer / surplus, tol));
    }
    return out;
}

std::vector<GuaranteeCertificate> verify_procurement_quantity(double eta, const std::vector<double>& theta_grid,
                                                              double tol) {
    const ProcurementQuantity offer = procurement_quantity(eta);
    const double z = offer.markup;
    std::vector<GuaranteeCertificate> out;
    for (double theta : theta_grid) {
        if (!(theta > 0.0)) {
            throw DomainError("verify_procurement_quantity: theta must be > 0");
        }
        // Marginal payment p(q) = z q^(1/eta) and marginal utility q^(1/eta)
        // are both decreasing; solve on their negatives.
        auto solve = [&](double scale) {
            auto g = [&](double q) { return -scale * std::pow(q, 1.0 / eta); };
            double lo = 1.0;
            while (g(lo) > -theta) {
                lo *= 0.5;
            }
            const auto hi = bracket_above(g, -theta, 1.0);
            if (!hi) {
                throw ConvergenceError("procurement: no best response");
            }
            return solve_monotone(g, -theta, lo, std::max(*hi, lo));
        };
        const double q = solve(z);
        const double q_eff = solve(1.0);
        const double c = eta / (eta + 1.0);
        auto gross = [&](double qq) { return c * std::pow(qq, (eta + 1.0) / eta); };
        const double buyer = gross(q) - z * gross(q);
        const double surplus = gross(q_eff) - theta * q_eff;
        out.push_back(make_certificate("procurement.quantity", {{"eta", eta}, {"theta", theta}, {"z", z}},
                                       "theta=" + fmt(theta), Sense::equal, offer.share, buyer / surplus, tol));
    }
    return out;
}

SaddleGap saddle_gap(double eta, double k, std::size_t n_grid) {
    const IsoElasticCost cost(eta);
    const ValueDistribution F = ValueDistribution::truncated_pareto(eta / (eta - 1.0), k);
    const DirectMechanism bayes = bayes_optimal_mechanism(F, cost, n_grid);
    const double pb = mechanism_profit(F, bayes, cost).value;
    const double pg = mechanism_profit(F, guarantee_mechanism(eta), cost).value;
    const double s = efficient_surplus(F, cost).value;
    return {k, pb, pg, s, (pb - pg) / pb};
}

TightnessCheck frontier_tightness(double beta, double eta, int limit_steps) {
    const double alpha = frontier_attaining_shape(beta, eta);
    const double boundary = eta / (eta - 1.0);
    TightnessCheck t{beta, alpha, frontier(beta, eta), 0.0, 0.0, 0.0};
    auto outcome = [&](double a) { return bayes_outcome(ValueDistribution::pareto(a), eta).report; };
    if (alpha > boundary * (1.0 + 1e-12)) {
        const SurplusReport r = outcome(alpha);
        t.measured_beta = r.pi_ratio;
        t.measured_u = r.u_ratio;
    } else {
        SurplusReport last;
        for (int j = 1; j <= limit_steps; ++j) {
            last = outcome(boundary * (1.0 + std::pow(10.0, -j)));
        }
        t.measured_beta = last.pi_ratio;
        t.measured_u = last.u_ratio;
    }
    t.error = std::max(std::abs(t.measured_beta - beta), std::abs(t.measured_u - t.expected_u));
    return t;
}

std::vector<ValueDistribution> standard_battery(double eta) {
    if (!(eta > 1.0)) {
        throw DomainError("standard_battery: eta must be > 1");
    }
    std::vector<double> values;
    std::vector<double> masses;
    for (int i = 1; i <= 10; ++i) {
        values.push_back(0.5 * i);
        masses.push_back((11.0 - i) / 55.0);
    }
    return {ValueDistribution::uniform(0.0, 1.0), ValueDistribution::binary(1.0, 2.0, 0.3),
            ValueDistribution::truncated_pareto(eta / (eta - 1.0) + 0.5, 100.0), ValueDistribution::point_mass(1.0),
            ValueDistribution::discrete(values, masses)};
}

std::vector<ValueDistribution> random_mixture_battery(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> endpoint(0.0, 5.0);
    std::uniform_real_distribution<double> shape(0.5, 5.0);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<ValueDistribution> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int parts = coin(rng) < 0.5 ? 2 : 3;
        std::vector<ValueDistribution> comps;
        std::vector<double> w;
        double total = 0.0;
        for (int j = 0; j < parts; ++j) {
            if (coin(rng) < 0.6) {
                double a = endpoint(rng);
                double b = endpoint(rng);
                while (std::abs(a - b) < 0.1) {
                    b = endpoint(rng);
                }
                comps.push_back(ValueDistribution::uniform(std::min(a, b), std::max(a, b)));
            } else {
                comps.push_back(ValueDistribution::power(shape(rng)));
            }
            w.push_back(weight(rng));
            total += w.back();
        }
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < w.size(); ++j) {
            w[j] /= total;
            acc += w[j];
        }
        w.back() = 1.0 - acc;
        out.push_back(ValueDistribution::mixture(std::move(comps), std::move(w)));
    }
    return out;
}

}  // namespace markup
