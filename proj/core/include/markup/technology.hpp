#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace markup {

/// c(q) = q^eta / eta with eta > 1.
class IsoElasticCost {
public:
    explicit IsoElasticCost(double eta);

    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] double cost(double q) const;
    [[nodiscard]] double marginal(double q) const;
    [[nodiscard]] double curvature(double q) const;
    [[nodiscard]] double elasticity(double q) const;
    /// argmax_q v q - c(q) = v^(1/(eta-1)).
    [[nodiscard]] double efficient_quality(double v) const;
    /// max_q v q - c(q) = ((eta-1)/eta) v^(eta/(eta-1)).
    [[nodiscard]] double efficient_surplus(double v) const;

private:
    double eta_;
};

struct CostValidation {
    bool ok = true;
    double max_elasticity = 0.0;
    double min_third_derivative = 0.0;
    bool third_derivative_ok = true;
    std::vector<std::string> problems;
};

/// Convex cost given by evaluators for c, c' and c''. The declared
/// elasticity bound and probe range are used by validate().
class GeneralConvexCost {
public:
    using Fn = std::function<double(double)>;

    GeneralConvexCost(Fn c, Fn c1, Fn c2, double eta_bar, double q_min = 1e-3, double q_max = 1e3);

    static GeneralConvexCost iso_elastic(double eta);
    /// c(q) = sum_i coeffs[i] q^i. coeffs[0] must be 0.
    static GeneralConvexCost polynomial(std::vector<double> coeffs, double eta_bar, double q_min = 1e-3,
                                        double q_max = 1e2);

    [[nodiscard]] double cost(double q) const { return c_(q); }
    [[nodiscard]] double marginal(double q) const { return c1_(q); }
    [[nodiscard]] double curvature(double q) const { return c2_(q); }
    [[nodiscard]] double eta_bar() const { return eta_bar_; }
    [[nodiscard]] double q_min() const { return q_min_; }
    [[nodiscard]] double q_max() const { return q_max_; }
    /// Set for costs built by iso_elastic(); lets callers use closed forms.
    [[nodiscard]] std::optional<double> iso_eta() const { return iso_eta_; }

    /// Best-effort checks on a 256-point geometric grid over [q_min, q_max]:
    /// c(0) = 0, c' nondecreasing, finite-difference c''' >= -1e-6 and
    /// measured elasticity <= eta_bar + 1e-8.
    [[nodiscard]] CostValidation validate() const;

private:
    Fn c_;
    Fn c1_;
    Fn c2_;
    double eta_bar_;
    double q_min_;
    double q_max_;
    std::optional<double> iso_eta_;
};

double pointwise_elasticity(const GeneralConvexCost& cost, double q);
double pointwise_elasticity(const IsoElasticCost& cost, double q);

double efficient_quality(double v, const IsoElasticCost& cost);
/// Solves c'(q) = v by bracketing plus safeguarded Newton. Throws
/// ConvergenceError when c' never reaches v.
double efficient_quality(double v, const GeneralConvexCost& cost);

/// u(v, q) = v (eta/(eta+1)) q^((eta+1)/eta), eta < -1, unit marginal cost.
class SeparableQuantityUtility {
public:
    explicit SeparableQuantityUtility(double eta);

    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] double utility(double v, double q) const;
    [[nodiscard]] double marginal_utility(double v, double q) const;
    /// (p / v)^eta.
    [[nodiscard]] double demand(double v, double p) const;
    /// Consumer value of efficient trade at unit cost: int_1^inf D(v, p) dp.
    [[nodiscard]] double efficient_surplus(double v) const;

private:
    double eta_;
};

/// Quantity-side demand with possibly price-dependent elasticity.
class NonlinearDemandModel {
public:
    using Fn2 = std::function<double(double, double)>;

    /// marginal_utility is h_q(v, q), strictly decreasing in q. demand and
    /// elasticity are optional closed forms; missing ones are derived
    /// numerically.
    NonlinearDemandModel(Fn2 marginal_utility, double eta_bar, Fn2 demand = {}, Fn2 elasticity = {},
                         std::string label = "nonlinear");

    static NonlinearDemandModel from_separable(const SeparableQuantityUtility& u);
    /// Elasticity eta_bar - 1 + p^-(1+v) on p >= 1, constant eta_bar below.
    /// Lies in [eta_bar - 1, eta_bar] and is non-increasing in p.
    static NonlinearDemandModel drifting_elasticity(double eta_bar);

    [[nodiscard]] double eta_bar() const { return eta_bar_; }
    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] double marginal_utility(double v, double q) const { return h_q_(v, q); }
    [[nodiscard]] bool has_analytic_demand() const { return static_cast<bool>(demand_); }
    [[nodiscard]] bool has_analytic_elasticity() const { return static_cast<bool>(elasticity_); }

    /// D(v, p) = h_q^-1(v, p).
    [[nodiscard]] double demand(double v, double p) const;
    /// Same, always by inverting h_q (ignores a closed-form demand).
    [[nodiscard]] double demand_by_inversion(double v, double p) const;
    [[nodiscard]] double demand_elasticity(double v, double p) const;
    /// Central-difference elasticity with step max(1e-6, 1e-6 p).
    [[nodiscard]] double numeric_elasticity(double v, double p) const;
    /// int_1^inf D(v, p) dp at unit marginal cost.
    [[nodiscard]] double efficient_surplus(double v) const;

    struct BandCheck {
        bool ok = true;
        double min_elasticity = 0.0;
        double max_elasticity = 0.0;
        double max_increase = 0.0;
    };
    /// Probes elasticity on values x prices (prices >= 1 only).
    [[nodiscard]] BandCheck check_band(const std::vector<double>& values,
                                       const std::vector<double>& prices) const;

private:
    Fn2 h_q_;
    double eta_bar_;
    Fn2 demand_;
    Fn2 elasticity_;
    std::string label_;
};

double demand(const NonlinearDemandModel& model, double v, double p);
double demand_elasticity(const NonlinearDemandModel& model, double v, double p);

}  // namespace markup
