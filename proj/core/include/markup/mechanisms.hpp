#pragma once

#include "markup/technology.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace markup {

using Evaluator = std::function<double(double)>;

/// A direct menu v -> (Q(v), T(v)). Unless explicit transfers are given,
/// T follows the envelope identity T(v) = v Q(v) - int_0^v Q(s) ds.
class DirectMechanism {
public:
    /// `breakpoints` lists values where Q may jump or kink (exclusion
    /// threshold, ironed interval ends). `allocation_integral` and
    /// `inverse_allocation` are optional closed forms.
    DirectMechanism(std::string label, Evaluator allocation, std::vector<double> breakpoints = {},
                    Evaluator allocation_integral = {}, Evaluator inverse_allocation = {});

    /// Menu with transfers supplied directly rather than by the envelope.
    static DirectMechanism from_menu(std::string label, Evaluator allocation, Evaluator transfer,
                                     std::vector<double> breakpoints = {});

    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] double allocation(double v) const;
    [[nodiscard]] double transfer(double v) const;
    /// v Q(v) - T(v).
    [[nodiscard]] double utility(double v) const { return v * allocation(v) - transfer(v); }
    /// int_0^v Q(s) ds.
    [[nodiscard]] double allocation_integral(double v) const;
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
    [[nodiscard]] bool has_explicit_transfer() const { return static_cast<bool>(transfer_); }
    [[nodiscard]] const Evaluator& inverse_allocation() const { return inverse_; }

    /// Copy with transfers replaced by T.
    [[nodiscard]] DirectMechanism with_transfer(Evaluator transfer, std::string label) const;

private:
    std::string label_;
    Evaluator allocation_;
    std::vector<double> breakpoints_;
    Evaluator integral_;
    Evaluator inverse_;
    Evaluator transfer_;
};

/// Q(v) = (v/eta)^(1/(eta-1)).
DirectMechanism guarantee_mechanism(double eta);

/// T(v) = v Q(v) - int_0^v Q(s) ds by quadrature, split at `breakpoints`.
/// Throws QuadratureError with the achieved error on failure.
double envelope_transfer(const Evaluator& allocation, double v, const std::vector<double>& breakpoints = {});

/// A jump of the allocation at a breakpoint: quantities in (q_lo, q_hi)
/// are never sold.
struct QuantityGap {
    double v;
    double q_lo;
    double q_hi;
};

/// Marginal price schedule p(q) = inf{v : Q(v) >= q} and total payment
/// P(q) = int_0^q p(s) ds over the quantities sold to v in [v_lo, v_hi].
class IndirectTariff {
public:
    IndirectTariff(const DirectMechanism& mechanism, double v_lo, double v_hi, std::size_t grid_size);

    /// Throws DomainError for q inside a gap or outside [q_min, q_max].
    [[nodiscard]] double price(double q) const;
    [[nodiscard]] double payment(double q) const;
    [[nodiscard]] double q_min() const { return q_cache_.front(); }
    [[nodiscard]] double q_max() const { return q_cache_.back(); }
    [[nodiscard]] const std::vector<QuantityGap>& gaps() const { return gaps_; }

private:
    [[nodiscard]] double generalized_inverse(double q) const;

    DirectMechanism mechanism_;
    std::vector<double> v_cache_;
    std::vector<double> q_cache_;
    std::vector<QuantityGap> gaps_;
};

/// Builds the tariff over [v_lo, v_hi] with a log-spaced inversion cache.
IndirectTariff marginal_price(const DirectMechanism& mechanism, double v_lo = 0.0, double v_hi = 1e3,
                              std::size_t grid_size = 4096);

struct MarkupMechanism {
    /// c'(q(v)) = z v.
    double z;
    /// 1 - z, the Lerner index in the iso-elastic case.
    double lerner;
    DirectMechanism mechanism;
    std::vector<std::string> warnings;
};

/// Constant-markup menu for a validated convex cost. Throws DomainError when
/// validation fails; warns when eta_bar < 2.
MarkupMechanism constant_markup_mechanism(const GeneralConvexCost& cost);

/// Linear price p* per unit, unit marginal cost.
struct UniformPriceMechanism {
    double p_star;
    double eta_bar;

    [[nodiscard]] double quantity(double v, const NonlinearDemandModel& model) const;
    /// (p* - 1) D(v, p*).
    [[nodiscard]] double profit(double v, const NonlinearDemandModel& model) const;
    /// int_{p*}^inf D(v, p) dp.
    [[nodiscard]] double buyer_surplus(double v, const NonlinearDemandModel& model) const;
};

UniformPriceMechanism uniform_price_mechanism(double eta_bar);

struct IcAudit {
    double max_ic_violation = 0.0;
    double max_ir_violation = 0.0;
    double worst_type = 0.0;
    double worst_report = 0.0;
};

/// Pairwise IC and IR check on an ascending grid.
IcAudit ic_audit(const DirectMechanism& mechanism, const std::vector<double>& grid);

/// Columns v,Q,T.
void write_menu_csv(std::ostream& os, const DirectMechanism& mechanism, const std::vector<double>& grid);
/// Columns q,p,P. Quantities inside gaps are skipped.
void write_tariff_csv(std::ostream& os, const IndirectTariff& tariff, const std::vector<double>& q_grid);

}  // namespace markup
