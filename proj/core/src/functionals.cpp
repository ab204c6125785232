#include "markup/functionals.hpp"

#include "markup/errors.hpp"
#include "markup/io.hpp"
#include "markup/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace markup {
namespace {

std::vector<double> support_nodes(const ValueDistribution& F, const std::vector<double>& extra, double from) {
    std::vector<double> nodes{from};
    auto add = [&](double b) {
        if (b > from && b < F.upper()) {
            nodes.push_back(b);
        }
    };
    for (double b : F.breakpoints()) {
        add(b);
    }
    for (double b : extra) {
        add(b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nodes.push_back(F.upper());
    return nodes;
}

bool purely_atomic(const ValueDistribution& F) { return F.atom_mass() >= 1.0 - 1e-15; }

// int_0^inf Q(v)(1 - F(v)) dv.
Estimate rent_integral(const ValueDistribution& F, const DirectMechanism& M, const QuadratureOptions& opts) {
    std::vector<double> extra = M.breakpoints();
    extra.push_back(F.lower());
    const auto nodes = support_nodes(F, extra, 0.0);
    return integrate_piecewise([&](double v) { return M.allocation(v) * (1.0 - F.cdf(v)); }, nodes, opts);
}

std::string context(const ValueDistribution& F, const DirectMechanism& M) {
    return " [" + F.describe() + ", " + M.label() + "]";
}

template <class Fn>
auto with_context(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const QuadratureError& e) {
        throw QuadratureError(std::string(e.what()) + where, e.achieved_error());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + where);
    }
}

}  // namespace

ValueDistribution prepare_distribution(const ValueDistribution& F, double eta, const FunctionalOptions& opts) {
    if (F.bounded()) {
        return F;
    }
    if (opts.truncation_k) {
        return truncate(F, *opts.truncation_k);
    }
    if (at_finiteness_boundary(F, eta)) {
        throw InfiniteSurplusError("efficient surplus of " + F.describe() +
                                   " sits on the finiteness boundary; pass an explicit truncation k");
    }
    if (!tail_condition(F, eta)) {
        throw InfiniteSurplusError("efficient surplus of " + F.describe() + " is infinite for eta=" +
                                   std::to_string(eta));
    }
    return F;
}

Estimate expectation(const ValueDistribution& F, const Evaluator& g, const std::vector<double>& extra_breakpoints,
                     const QuadratureOptions& opts) {
    Estimate total;
    if (!purely_atomic(F)) {
        const auto nodes = support_nodes(F, extra_breakpoints, F.lower());
        total += integrate_piecewise(
            [&](double v) {
                const double f = F.density(v);
                return f == 0.0 ? 0.0 : g(v) * f;
            },
            nodes, opts);
    }
    for (const auto& a : F.atoms()) {
        total.value += a.mass * g(a.location);
    }
    return total;
}

Estimate efficient_surplus(const ValueDistribution& F, const IsoElasticCost& cost, const FunctionalOptions& opts) {
    const double eta = cost.eta();
    const ValueDistribution G = prepare_distribution(F, eta, opts);
    const double p = eta / (eta - 1.0);
    if (opts.method != SurplusMethod::quadrature) {
        const auto m = G.power_moment(p);
        if (m && std::isfinite(*m)) {
            return {(eta - 1.0) / eta * *m, 0.0, 0};
        }
        if (m) {
            throw InfiniteSurplusError("efficient surplus of " + G.describe() + " is infinite");
        }
        if (opts.method == SurplusMethod::closed_form) {
            throw DomainError("efficient_surplus: no closed form for " + G.describe());
        }
    }
    return with_context(" [" + G.describe() + "]", [&] {
        return expectation(G, [&](double v) { return cost.efficient_surplus(v); }, {}, opts.quadrature);
    });
}

Estimate efficient_surplus(const ValueDistribution& F, const GeneralConvexCost& cost, const FunctionalOptions& opts) {
    if (cost.iso_eta()) {
        return efficient_surplus(F, IsoElasticCost(*cost.iso_eta()), opts);
    }
    const ValueDistribution G = F.bounded() || !opts.truncation_k ? F : truncate(F, *opts.truncation_k);
    return with_context(" [" + G.describe() + "]", [&] {
        return expectation(
            G,
            [&](double v) {
                const double q = efficient_quality(v, cost);
                return v * q - cost.cost(q);
            },
            {}, opts.quadrature);
    });
}

Estimate mechanism_profit(const ValueDistribution& F, const DirectMechanism& M, const GeneralConvexCost& cost,
                          const FunctionalOptions& opts) {
    const ValueDistribution G =
        cost.iso_eta() ? prepare_distribution(F, *cost.iso_eta(), opts)
                       : (F.bounded() || !opts.truncation_k ? F : truncate(F, *opts.truncation_k));
    return with_context(context(G, M), [&] {
        if (M.has_explicit_transfer()) {
            return expectation(
                G, [&](double v) { return M.transfer(v) - cost.cost(M.allocation(v)); }, M.breakpoints(),
                opts.quadrature);
        }
        Estimate gross = expectation(
            G,
            [&](double v) {
                const double q = M.allocation(v);
                return v * q - cost.cost(q);
            },
            M.breakpoints(), opts.quadrature);
        const Estimate rent = rent_integral(G, M, opts.quadrature);
        gross.value -= rent.value;
        gross.error += rent.error;
        gross.evaluations += rent.evaluations;
        return gross;
    });
}

Estimate mechanism_profit(const ValueDistribution& F, const DirectMechanism& M, const IsoElasticCost& cost,
                          const FunctionalOptions& opts) {
    return mechanism_profit(F, M, GeneralConvexCost::iso_elastic(cost.eta()), opts);
}

Estimate consumer_surplus(const ValueDistribution& F, const DirectMechanism& M, const FunctionalOptions& opts) {
    const ValueDistribution G = F.bounded() || !opts.truncation_k ? F : truncate(F, *opts.truncation_k);
    return with_context(context(G, M), [&] {
        if (M.has_explicit_transfer()) {
            return expectation(G, [&](double v) { return M.utility(v); }, M.breakpoints(), opts.quadrature);
        }
        return rent_integral(G, M, opts.quadrature);
    });
}

SurplusReport full_report(const ValueDistribution& F, const DirectMechanism& M, const GeneralConvexCost& cost,
                          const FunctionalOptions& opts) {
    SurplusReport r;
    r.distribution = F.describe();
    r.mechanism = M.label();
    const Estimate S = efficient_surplus(F, cost, opts);
    const Estimate Pi = mechanism_profit(F, M, cost, opts);
    const Estimate U = consumer_surplus(F, M, opts);
    r.S = S.value;
    r.Pi = Pi.value;
    r.U = U.value;
    r.err_S = S.error;
    r.err_Pi = Pi.error;
    r.err_U = U.error;
    r.pi_ratio = r.Pi / r.S;
    r.u_ratio = r.U / r.S;
    if (opts.check_feasibility) {
        const double slack = 10.0 * (r.err_S + r.err_Pi + r.err_U) + 1e-12 * std::abs(r.S);
        if (r.S - (r.Pi + r.U) < -slack) {
            std::ostringstream os;
            os.precision(17);
            os << "full_report: S=" << r.S << " < Pi+U=" << r.Pi + r.U << " beyond slack " << slack
               << context(F, M);
            throw FeasibilityError(os.str());
        }
    }
    return r;
}

SurplusReport full_report(const ValueDistribution& F, const DirectMechanism& M, const IsoElasticCost& cost,
                          const FunctionalOptions& opts) {
    return full_report(F, M, GeneralConvexCost::iso_elastic(cost.eta()), opts);
}

Estimate profit_virtual_form(const ValueDistribution& F, const IsoElasticCost& cost, const FunctionalOptions& opts,
                             std::size_t n_grid) {
    const ValueDistribution G = prepare_distribution(F, cost.eta(), opts);
    if (G.atom_mass() > 0.0) {
        throw DomainError("profit_virtual_form: requires an atomless distribution");
    }
    const DirectMechanism M = bayes_optimal_mechanism(G, cost, n_grid);
    return with_context(context(G, M), [&] {
        return expectation(
            G,
            [&](double v) {
                const double q = M.allocation(v);
                if (q == 0.0) {
                    return 0.0;
                }
                return virtual_value(G, v) * q - cost.cost(q);
            },
            M.breakpoints(), opts.quadrature);
    });
}

void write_report_csv_header(std::ostream& os) {
    write_csv_row(os, std::vector<std::string>{"S", "Pi", "U", "pi_ratio", "u_ratio", "err_S", "err_Pi", "err_U"});
}

void write_report_csv_row(std::ostream& os, const SurplusReport& r) {
    write_csv_row(os, std::vector<double>{r.S, r.Pi, r.U, r.pi_ratio, r.u_ratio, r.err_S, r.err_Pi, r.err_U});
}

}  // namespace markup
