#pragma once

#include "markup/distributions.hpp"
#include "markup/mechanisms.hpp"
#include "markup/technology.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace markup {

/// phi(v) = v - (1 - F(v))/f(v). Throws DomainError at atoms and where the
/// density vanishes.
double virtual_value(const ValueDistribution& F, double v);

struct IronedInterval {
    double v_lo;
    double v_hi;
    /// Quantile range [F(v_lo-), F(v_hi)].
    double x_lo;
    double x_hi;
    /// Conditional mean of phi over the interval.
    double value;
    /// Grid cells spanned before endpoint refinement.
    std::size_t cells;
};

/// Raw and ironed virtual values of a distribution.
///
/// Ironing works on H(x) = int_0^x phi(F^-1(s)) ds = -(1 - x) F^-1(x) in
/// quantile space. The ironed curve is the slope of the greatest convex
/// minorant of H, computed on a uniform x-grid refined with atom blocks and
/// breakpoint quantiles.
class VirtualValueCurve {
public:
    VirtualValueCurve(ValueDistribution F, std::size_t n_grid);

    [[nodiscard]] const ValueDistribution& distribution() const { return F_; }
    [[nodiscard]] double phi(double v) const { return virtual_value(F_, v); }
    [[nodiscard]] double phi_bar(double v) const;
    [[nodiscard]] const std::vector<IronedInterval>& ironed_intervals() const { return intervals_; }
    [[nodiscard]] bool is_ironed(double v) const;
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

    /// The quantile grid, H at its nodes and the per-cell slope of the
    /// convex minorant (before endpoint refinement).
    [[nodiscard]] const std::vector<double>& grid_x() const { return x_; }
    [[nodiscard]] const std::vector<double>& grid_h() const { return h_; }
    [[nodiscard]] const std::vector<double>& grid_slopes() const { return slopes_; }

private:
    [[nodiscard]] double hull_slope_at(double x) const;
    [[nodiscard]] const IronedInterval* interval_containing(double v) const;

    ValueDistribution F_;
    std::vector<double> x_;
    std::vector<double> h_;
    std::vector<double> slopes_;
    std::vector<IronedInterval> intervals_;
    std::vector<std::string> warnings_;
};

VirtualValueCurve iron(const ValueDistribution& F, std::size_t n_grid = 10000);

/// Q(v) = max{phi_bar(v), 0}^(1/(eta-1)); zero below the exclusion threshold
/// and below the support. Transfers by the envelope identity.
DirectMechanism bayes_optimal_mechanism(const ValueDistribution& F, const IsoElasticCost& cost,
                                        std::size_t n_grid = 10000);
/// Same, reusing an already ironed curve.
DirectMechanism bayes_optimal_mechanism(std::shared_ptr<const VirtualValueCurve> curve, const IsoElasticCost& cost);

/// Smallest v with phi_bar(v) >= 0 (lower support end if none is excluded,
/// +inf if every type is excluded).
double exclusion_threshold(const VirtualValueCurve& curve);

/// v -> (1 - F(v))/(f(v) v), the Lerner index of the Bayes-optimal tariff.
/// The returned evaluator throws DomainError inside ironed intervals.
Evaluator bayes_markup_curve(const ValueDistribution& F, const IsoElasticCost& cost, std::size_t n_grid = 10000);

/// Writes v, phi, phi_bar, ironed_flag.
void write_virtual_value_csv(std::ostream& os, const VirtualValueCurve& curve, const std::vector<double>& grid);

struct DiscreteScreeningInstance {
    std::vector<double> values;
    std::vector<double> masses;
    IsoElasticCost cost;
    std::vector<double> quality_grid;
};

enum class OracleMode { exhaustive, reduced, both };

struct OracleResult {
    /// Best menu found by the selected mode (exhaustive when it ran).
    double profit = 0.0;
    std::vector<double> allocation;
    std::vector<double> transfers;
    /// Reduced-mode optimum (continuous qualities).
    double reduced_profit = 0.0;
    std::vector<double> reduced_allocation;
    /// Discrete ironed virtual values used by the reduced mode.
    std::vector<double> ironed_virtual_values;
    std::size_t combinations = 0;
    /// Set in `both` mode: the exhaustive optimum never beats the reduced
    /// one and trails it by at most `agreement_tol` relative.
    bool modes_agree = true;
    double relative_gap = 0.0;
    std::vector<std::string> warnings;
};

/// Exhaustive mode caps the number of nondecreasing grid vectors,
/// C(G + n - 1, n), at 1e7 and n at 12.
inline constexpr double kOracleCombinationCap = 1e7;

OracleResult discrete_oracle(const DiscreteScreeningInstance& inst, OracleMode mode = OracleMode::both,
                             double agreement_tol = 0.02);

/// Number of nondecreasing vectors of length n over g grid levels.
double monotone_vector_count(std::size_t g, std::size_t n);

}  // namespace markup
