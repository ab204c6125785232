#pragma once

#include "markup/closed_forms.hpp"
#include "markup/distributions.hpp"
#include "markup/functionals.hpp"
#include "markup/technology.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace markup {

enum class Sense { at_least, at_most, equal };

/// One checked claim: measured against bound with a tolerance.
struct GuaranteeCertificate {
    std::string claim_id;
    std::vector<std::pair<std::string, double>> parameters;
    std::string subject;
    Sense sense = Sense::at_least;
    double bound_value = 0.0;
    double measured_value = 0.0;
    /// measured - bound (at_least), bound - measured (at_most), -|measured - bound| (equal).
    double slack = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

GuaranteeCertificate make_certificate(std::string claim_id, std::vector<std::pair<std::string, double>> parameters,
                                      std::string subject, Sense sense, double bound, double measured,
                                      double tolerance);

const char* to_string(Sense s);

inline constexpr double kDefaultTolerance = 1e-6;

enum class Branch { upper, lower, zero_cs };
const char* to_string(Branch b);

struct FrontierPoint {
    double beta;
    double u_over_s;
    double alpha;
    Branch branch;
};

/// Point on the eta = 2 boundary traced by Pareto(alpha): upper branch for
/// alpha >= 2, lower branch for alpha in [1, 2].
FrontierPoint eta2_boundary(double alpha);

/// Zero consumer surplus segment: truncated Pareto(1, k) points with
/// Pi/S = k/(2k - 1), for n values of k spread from 1 to 1e12.
std::vector<FrontierPoint> eta2_zero_cs_segment(std::size_t n);

enum class Membership { interior, boundary, exterior };
const char* to_string(Membership m);

/// Classifies (x, y) = (U/S, Pi/S) against the eta = 2 feasible set
/// {x >= 0, x + 2y >= 1, x <= 2(sqrt(y) - y), y <= 1}.
Membership eta2_membership(double x, double y, double tol = 1e-9);

struct Eta2Witness {
    double alpha;
    double k;
    double x;
    double y;
    double distance;
};
/// Heuristic search over truncated Pareto(alpha, k) for a law whose
/// Bayes-optimal outcome lands within `tol` of (x, y). nullopt if none found.
std::optional<Eta2Witness> eta2_witness(double x, double y, double tol = 1e-6);

/// Frontier sweep over n feasible beta values (left end to 1).
std::vector<FrontierPoint> frontier_sweep(double eta, std::size_t n);

/// Measured (U/S, Pi/S) of the Bayes-optimal menu together with its report.
struct BayesOutcome {
    SurplusReport report;
    std::vector<std::string> warnings;
};
BayesOutcome bayes_outcome(const ValueDistribution& F, double eta, const FunctionalOptions& opts = {},
                           std::size_t n_grid = 10000);

/// Pi/S and U/S of the guarantee mechanism against the closed forms.
std::vector<GuaranteeCertificate> verify_guarantee_mechanism(const ValueDistribution& F, double eta,
                                                             double tol = kDefaultTolerance,
                                                             const FunctionalOptions& opts = {});

/// U/S <= frontier(Pi/S) for the Bayes-optimal outcome.
GuaranteeCertificate holder_audit(const ValueDistribution& F, double eta, double tol = kDefaultTolerance,
                                  const FunctionalOptions& opts = {});
GuaranteeCertificate holder_audit(const SurplusReport& bayes_report, double eta, double tol = kDefaultTolerance);

/// (U + Pi)/S >= 1/eta under the Bayes-optimal menu (eta >= 2).
GuaranteeCertificate verify_surplus_lower_bound(const SurplusReport& bayes_report, double eta,
                                                double tol = kDefaultTolerance);
/// ((eta-1) U + eta Pi)/(2 eta - 1) >= S/(2 eta - 1), in ratio form.
GuaranteeCertificate verify_lower_bound_combination(const SurplusReport& bayes_report, double eta,
                                                    double tol = kDefaultTolerance);

/// Constant-markup profit against S/(eta_bar + 2 sqrt(eta_bar - 1)).
GuaranteeCertificate verify_convex_cost(const ValueDistribution& F, const GeneralConvexCost& cost,
                                        double tol = kDefaultTolerance, const FunctionalOptions& opts = {});
/// 1/(eta_bar + 2 sqrt(eta_bar - 1)) <= eta_bar^(-eta_bar/(eta_bar-1)), strict for eta_bar > 2.
GuaranteeCertificate compare_convex_bounds(double eta_bar);

/// Uniform price against the separable model: Pi/S equals the guarantee for
/// every F (checked both pointwise and integrated).
std::vector<GuaranteeCertificate> verify_quantity_separable(const ValueDistribution& F, double eta_bar,
                                                            double tol = kDefaultTolerance);
/// Uniform price against a nonlinear model: pointwise Pi(v) >= share S(v)
/// on `v_grid` plus the integrated inequality. Throws DomainError on an
/// elasticity band violation.
std::vector<GuaranteeCertificate> verify_quantity_nonlinear(const ValueDistribution& F,
                                                            const NonlinearDemandModel& model,
                                                            const std::vector<double>& v_grid,
                                                            double tol = kDefaultTolerance);

/// Buyer surplus share against seller best responses, pointwise in theta.
std::vector<GuaranteeCertificate> verify_procurement_quality(double eta, const std::vector<double>& theta_grid,
                                                             double tol = 1e-9);
std::vector<GuaranteeCertificate> verify_procurement_quantity(double eta, const std::vector<double>& theta_grid,
                                                              double tol = 1e-9);

struct SaddleGap {
    double k;
    double pi_bayes;
    double pi_guarantee;
    double surplus;
    /// (pi_bayes - pi_guarantee)/pi_bayes.
    double relative_gap;
};
/// Bayes-optimal against guarantee profit on truncated Pareto(eta/(eta-1), k).
SaddleGap saddle_gap(double eta, double k, std::size_t n_grid = 10000);

struct TightnessCheck {
    double beta;
    double alpha;
    double expected_u;
    double measured_beta;
    double measured_u;
    /// Largest coordinate error.
    double error;
};
/// Bayes-optimal outcome of Pareto(frontier_attaining_shape(beta, eta)).
/// At the left end (alpha = eta/(eta-1), infinite S) the outcome is a limit
/// evaluation at alpha (1 + 10^-j), j = 1..limit_steps.
TightnessCheck frontier_tightness(double beta, double eta, int limit_steps = 6);

/// Uniform(0,1), Binary(1,2,0.3), TruncatedPareto(eta/(eta-1)+0.5, 100),
/// PointMass(1) and a ten-point discrete law.
std::vector<ValueDistribution> standard_battery(double eta);

/// Mixtures of 2 or 3 Uniform(a,b) / Power(alpha) components with
/// a, b in [0, 5] and alpha in [0.5, 5]; deterministic for a given seed.
std::vector<ValueDistribution> random_mixture_battery(std::size_t count, std::uint64_t seed);

}  // namespace markup
