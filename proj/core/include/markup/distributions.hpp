#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace markup {

/// A mass point of a value distribution.
struct Atom {
    double location;
    double mass;
};

class ValueDistribution;

namespace dist {

/// Pareto below k with the residual mass k^-alpha sitting on k.
struct TruncatedPareto {
    double alpha;
    double k;
};
/// F(v) = 1 - v^-alpha on [1, inf).
struct Pareto {
    double alpha;
};
struct Uniform {
    double a;
    double b;
};
/// Two-point law: v_hi with probability p_hi, v_lo otherwise.
struct Binary {
    double v_lo;
    double v_hi;
    double p_hi;
};
/// F(v) = v^alpha on [0, 1].
struct Power {
    double alpha;
};
struct Discrete {
    std::vector<double> values;
    std::vector<double> masses;
};
struct PointMass {
    double v0;
};
struct Mixture {
    std::vector<ValueDistribution> components;
    std::vector<double> weights;
};

}  // namespace dist

/// Buyer willingness-to-pay law. Immutable after construction; every
/// evaluator is const and thread-safe.
///
/// Atoms are first-class: density() reports only the absolutely continuous
/// part and atoms() the mass points, so integrators never differentiate a
/// step.
class ValueDistribution {
public:
    enum class Kind { truncated_pareto, pareto, uniform, binary, power, discrete, point_mass, mixture };

    using Params = std::variant<dist::TruncatedPareto, dist::Pareto, dist::Uniform, dist::Binary,
                                dist::Power, dist::Discrete, dist::PointMass, dist::Mixture>;

    static ValueDistribution truncated_pareto(double alpha, double k);
    static ValueDistribution pareto(double alpha);
    static ValueDistribution uniform(double a, double b);
    static ValueDistribution binary(double v_lo, double v_hi, double p_hi);
    static ValueDistribution power(double alpha);
    static ValueDistribution discrete(std::vector<double> values, std::vector<double> masses);
    static ValueDistribution point_mass(double v0);
    static ValueDistribution mixture(std::vector<ValueDistribution> components,
                                     std::vector<double> weights);

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] const Params& params() const { return params_; }

    /// Closed support [lower(), upper()]; upper() may be +inf.
    [[nodiscard]] double lower() const { return lower_; }
    [[nodiscard]] double upper() const { return upper_; }
    [[nodiscard]] bool bounded() const;

    /// Right-continuous CDF F(v).
    [[nodiscard]] double cdf(double v) const;
    /// Left limit F(v-).
    [[nodiscard]] double cdf_left(double v) const;
    /// Density of the absolutely continuous part (0 off its support).
    [[nodiscard]] double density(double v) const;
    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    /// Total mass carried by atoms.
    [[nodiscard]] double atom_mass() const;
    /// Mass of an atom located exactly at v (0 if none).
    [[nodiscard]] double atom_mass_at(double v) const;

    /// inf{v : F(v) >= x}; the usual left-continuous quantile.
    [[nodiscard]] double quantile(double x) const;
    /// inf{v : F(v) > x}; differs from quantile() only at flat parts of F.
    [[nodiscard]] double quantile_right(double x) const;

    /// Ascending support points where the density may jump or F may be flat
    /// on one side: support endpoints, component endpoints and atom locations.
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// Closed form E[v^p] when available; +inf when the moment diverges.
    [[nodiscard]] std::optional<double> power_moment(double p) const;

    /// Smallest Pareto shape among unbounded components (+inf if bounded).
    [[nodiscard]] double tail_index() const;

    /// Inverse-CDF sampling from a uniform draw u in [0, 1).
    [[nodiscard]] double sample(double u) const { return quantile(u); }

    [[nodiscard]] std::string describe() const;

private:
    explicit ValueDistribution(Params params);
    void finalize();

    Params params_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::vector<Atom> atoms_;
    std::vector<double> breakpoints_;
};

/// lim (1 - F(v)) v^(eta/(eta-1)) = 0, the condition for finite efficient
/// surplus under iso-elastic cost with elasticity eta > 1.
bool tail_condition(const ValueDistribution& d, double eta);

/// True when some unbounded component sits exactly on alpha = eta/(eta-1).
/// Such laws are constructible but functionals need an explicit truncation.
bool at_finiteness_boundary(const ValueDistribution& d, double eta);

/// Pareto(eta/(eta-1)): the law against which the guarantee mechanism is
/// Bayes optimal. Surplus is infinite; use truncated versions with large k.
ValueDistribution minimax_distribution(double eta);

/// Moves the mass above k onto an atom at k. Defined for Pareto laws and
/// mixtures of them with bounded components; bounded laws are returned as is.
ValueDistribution truncate(const ValueDistribution& d, double k);

double cdf(const ValueDistribution& d, double v);

struct DensityAndAtoms {
    double density;
    std::vector<Atom> atoms;
};
DensityAndAtoms density_or_mass(const ValueDistribution& d, double v);

}  // namespace markup
