#pragma once

#include <functional>
#include <string>
#include <vector>

// Closed-form bounds and parametrizations. Every formula used by a verifier
// or mechanism constructor lives here.

namespace markup {

/// Normalized profit of the guarantee mechanism, eta^(-eta/(eta-1)).
double guarantee_ratio(double eta);
/// Normalized consumer surplus of the guarantee mechanism, eta^(-1/(eta-1)).
double consumer_share(double eta);

/// Bayes-optimal Pi/S on Pareto(alpha) with iso-elastic cost, ((alpha-1)/alpha)^(eta/(eta-1)).
/// Requires alpha > eta/(eta-1).
double pareto_profit_ratio(double alpha, double eta);
/// Bayes-optimal U/S on Pareto(alpha); equals frontier(pareto_profit_ratio(alpha, eta), eta).
double pareto_consumer_ratio(double alpha, double eta);

/// Smallest feasible Pi/S, the left end of the frontier domain.
double frontier_beta_min(double eta);
/// Maximal U/S given Pi/S = beta: (eta/(eta-1)) (beta^(1/eta) - beta).
double frontier(double beta, double eta);
/// Pareto shape attaining the frontier at beta: 1 / (1 - beta^((eta-1)/eta)).
double frontier_attaining_shape(double beta, double eta);

/// 1/eta, valid for eta >= 2.
double surplus_lower_bound(double eta);

/// Constant-markup multiplier z = 1/(sqrt(eta_bar - 1) + 1).
double markup_multiplier(double eta_bar);
/// 1/(eta_bar + 2 sqrt(eta_bar - 1)).
double convex_cost_guarantee(double eta_bar);

/// p* = eta_bar/(eta_bar + 1) for demand elasticity bound eta_bar < -1.
double uniform_price(double eta_bar);
/// (eta_bar/(eta_bar + 1))^eta_bar.
double quantity_guarantee(double eta_bar);

struct ProcurementQuality {
    double unit_price;
    double share;
};
/// Buyer offers unit price 1/eta to a seller with cost theta q^eta/eta.
ProcurementQuality procurement_quality(double eta);

struct ProcurementQuantity {
    double markup;
    double share;
};
/// Buyer offers p(q) = q^(1/eta)/z with z = (eta+1)/eta, eta < -1.
ProcurementQuantity procurement_quantity(double eta);

/// (U/S, Pi/S) of the Bayes-optimal menu on a truncated Pareto(alpha, k)
/// with quadratic cost. Stable through alpha = 2.
struct RatioPair {
    double u_over_s;
    double pi_over_s;
};
RatioPair truncated_pareto_eta2(double alpha, double k);

/// A sequence f(x_j) with x_j approaching a limit point, plus the last
/// value as the estimate.
struct LimitEvaluation {
    std::vector<double> points;
    std::vector<double> values;
    double estimate = 0.0;
    /// |values[n-1] - values[n-2]|.
    double last_step = 0.0;
};
/// Evaluates f at x0 + sign * scale * 10^-j for j = 1..steps.
LimitEvaluation limit_at(const std::function<double(double)>& f, double x0, double sign, int steps,
                         double scale = 1.0);
/// Evaluates f at 10^j for j = 1..steps (sign > 0) or -10^j (sign < 0).
LimitEvaluation limit_at_infinity(const std::function<double(double)>& f, double sign, int steps);

}  // namespace markup
