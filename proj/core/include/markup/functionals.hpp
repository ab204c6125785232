#pragma once

#include "markup/distributions.hpp"
#include "markup/mechanisms.hpp"
#include "markup/quadrature.hpp"
#include "markup/technology.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace markup {

struct SurplusReport {
    double S = 0.0;
    double Pi = 0.0;
    double U = 0.0;
    double pi_ratio = 0.0;
    double u_ratio = 0.0;
    double err_S = 0.0;
    double err_Pi = 0.0;
    double err_U = 0.0;
    std::string distribution;
    std::string mechanism;
};

enum class SurplusMethod { automatic, closed_form, quadrature };

struct FunctionalOptions {
    QuadratureOptions quadrature{};
    /// Explicit truncation for unbounded laws; required at the finiteness
    /// boundary alpha = eta/(eta-1).
    std::optional<double> truncation_k;
    SurplusMethod method = SurplusMethod::automatic;
    bool check_feasibility = true;
};

/// Applies the tail checks for elasticity eta: returns F (or its truncation
/// when truncation_k is set) and throws InfiniteSurplusError when S would
/// be infinite.
ValueDistribution prepare_distribution(const ValueDistribution& F, double eta, const FunctionalOptions& opts = {});

/// E[g(v)]: continuous part by piecewise quadrature, atoms summed exactly.
Estimate expectation(const ValueDistribution& F, const Evaluator& g, const std::vector<double>& extra_breakpoints = {},
                     const QuadratureOptions& opts = {});

/// S_F = E[max_q v q - c(q)].
Estimate efficient_surplus(const ValueDistribution& F, const IsoElasticCost& cost, const FunctionalOptions& opts = {});
Estimate efficient_surplus(const ValueDistribution& F, const GeneralConvexCost& cost,
                           const FunctionalOptions& opts = {});

/// Pi = E[v Q - c(Q)] - int_0^inf Q(v)(1 - F(v)) dv for envelope menus,
/// E[T - c(Q)] for menus with explicit transfers.
Estimate mechanism_profit(const ValueDistribution& F, const DirectMechanism& M, const GeneralConvexCost& cost,
                          const FunctionalOptions& opts = {});
Estimate mechanism_profit(const ValueDistribution& F, const DirectMechanism& M, const IsoElasticCost& cost,
                          const FunctionalOptions& opts = {});

/// U = int_0^inf Q(v)(1 - F(v)) dv for envelope menus.
Estimate consumer_surplus(const ValueDistribution& F, const DirectMechanism& M, const FunctionalOptions& opts = {});

/// S, Pi, U with ratios and error estimates. Throws FeasibilityError if
/// S < Pi + U beyond 10x the summed quadrature errors.
SurplusReport full_report(const ValueDistribution& F, const DirectMechanism& M, const GeneralConvexCost& cost,
                          const FunctionalOptions& opts = {});
SurplusReport full_report(const ValueDistribution& F, const DirectMechanism& M, const IsoElasticCost& cost,
                          const FunctionalOptions& opts = {});

/// Bayes-optimal profit written through virtual values,
/// int (phi(v) Q(v) - c(Q(v))) f(v) dv. Atomless laws only.
Estimate profit_virtual_form(const ValueDistribution& F, const IsoElasticCost& cost, const FunctionalOptions& opts = {},
                             std::size_t n_grid = 10000);

/// Columns S,Pi,U,pi_ratio,u_ratio,err_S,err_Pi,err_U.
void write_report_csv_header(std::ostream& os);
void write_report_csv_row(std::ostream& os, const SurplusReport& r);

}  // namespace markup
