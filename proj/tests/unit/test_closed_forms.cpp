#include "markup/closed_forms.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace markup;

TEST(ClosedForms, GuaranteeRatio) {
    EXPECT_DOUBLE_EQ(guarantee_ratio(2.0), 0.25);
    EXPECT_NEAR(guarantee_ratio(3.0), 1.0 / std::pow(3.0, 1.5), 1e-15);
    EXPECT_NEAR(guarantee_ratio(1.0 + 1e-9), std::exp(-1.0), 1e-6);
    EXPECT_NEAR(guarantee_ratio(1e9), 0.0, 1e-8);
}

TEST(ClosedForms, ConsumerShare) {
    EXPECT_DOUBLE_EQ(consumer_share(2.0), 0.5);
    EXPECT_NEAR(consumer_share(3.0), 1.0 / std::sqrt(3.0), 1e-15);
    // eta^(-1/(eta-1)) -> 1/e as eta -> 1 and -> 1 as eta -> inf.
    EXPECT_NEAR(consumer_share(1.0 + 1e-7), std::exp(-1.0), 1e-6);
    EXPECT_NEAR(consumer_share(1e9), 1.0, 1e-7);
}

TEST(ClosedForms, GuaranteePlusShareIsConsistent) {
    // Pi/S = (U/S)^eta.
    for (double eta : {1.2, 2.0, 3.5, 10.0}) {
        EXPECT_NEAR(guarantee_ratio(eta), std::pow(consumer_share(eta), eta), 1e-14);
    }
}

TEST(ClosedForms, ParetoRatios) {
    EXPECT_NEAR(pareto_profit_ratio(3.0, 2.0), 4.0 / 9.0, 1e-15);
    for (double eta : {1.5, 2.0, 3.0}) {
        for (double alpha : {eta / (eta - 1.0) + 0.1, 5.0, 20.0}) {
            const double b = pareto_profit_ratio(alpha, eta);
            EXPECT_NEAR(pareto_consumer_ratio(alpha, eta), frontier(b, eta), 1e-12);
        }
    }
}

TEST(ClosedForms, FrontierEndpoints) {
    for (double eta : {1.5, 2.0, 3.0, 6.0}) {
        EXPECT_NEAR(frontier(1.0, eta), 0.0, 1e-15);
        EXPECT_NEAR(frontier_beta_min(eta), guarantee_ratio(eta), 1e-15);
        EXPECT_NEAR(frontier(frontier_beta_min(eta), eta), consumer_share(eta), 1e-14);
    }
    EXPECT_NEAR(frontier(0.25, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(frontier(4.0 / 9.0, 2.0), 2.0 * (2.0 / 3.0 - 4.0 / 9.0), 1e-15);
}

TEST(ClosedForms, FrontierIsDecreasing) {
    for (double eta : {1.5, 2.0, 3.0}) {
        const double b0 = frontier_beta_min(eta);
        double prev = frontier(b0, eta);
        for (int i = 1; i <= 200; ++i) {
            const double b = b0 + (1.0 - b0) * i / 200.0;
            const double u = frontier(b, eta);
            EXPECT_LT(u, prev);
            prev = u;
        }
    }
}

TEST(ClosedForms, AttainingShapeInvertsParetoRatio) {
    for (double eta : {1.5, 2.0, 3.0}) {
        for (double alpha : {eta / (eta - 1.0) + 0.01, 4.0, 50.0}) {
            EXPECT_NEAR(frontier_attaining_shape(pareto_profit_ratio(alpha, eta), eta), alpha, 1e-9 * alpha);
        }
        EXPECT_NEAR(frontier_attaining_shape(frontier_beta_min(eta), eta), eta / (eta - 1.0), 1e-12);
    }
}

TEST(ClosedForms, SurplusLowerBound) {
    EXPECT_DOUBLE_EQ(surplus_lower_bound(2.0), 0.5);
    EXPECT_DOUBLE_EQ(surplus_lower_bound(4.0), 0.25);
    // The guarantee outcome clears it for eta >= 2.
    for (double eta : {2.0, 3.0, 8.0}) {
        EXPECT_GE(guarantee_ratio(eta) + consumer_share(eta), surplus_lower_bound(eta));
    }
}

TEST(ClosedForms, ConvexCostGuarantee) {
    EXPECT_DOUBLE_EQ(convex_cost_guarantee(2.0), 0.25);
    EXPECT_NEAR(convex_cost_guarantee(5.0), 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(markup_multiplier(10.0), 0.25, 1e-15);
    for (double eb : {2.5, 4.0, 10.0}) {
        EXPECT_LT(convex_cost_guarantee(eb), guarantee_ratio(eb));
    }
}

TEST(ClosedForms, UniformPriceAndQuantityGuarantee) {
    EXPECT_DOUBLE_EQ(uniform_price(-2.0), 2.0);
    EXPECT_DOUBLE_EQ(quantity_guarantee(-2.0), 0.25);
    EXPECT_NEAR(quantity_guarantee(-3.0), std::pow(1.5, -3.0), 1e-15);
    EXPECT_NEAR(quantity_guarantee(-1.0 - 1e-9), 0.0, 1e-6);
    EXPECT_NEAR(quantity_guarantee(-1e8), std::exp(-1.0), 1e-7);
}

TEST(ClosedForms, Procurement) {
    const auto q = procurement_quality(2.0);
    EXPECT_DOUBLE_EQ(q.unit_price, 0.5);
    EXPECT_DOUBLE_EQ(q.share, 0.5);
    // Seller at unit price p supplies (p/theta)^(1/(eta-1)); buyer keeps (1-p) q
    // against S = (1 - 1/eta) theta^(-1/(eta-1)).
    for (double eta : {1.5, 3.0, 5.0}) {
        const double p = procurement_quality(eta).unit_price;
        const double share = (1.0 - p) * std::pow(p, 1.0 / (eta - 1.0)) / (1.0 - 1.0 / eta);
        EXPECT_NEAR(procurement_quality(eta).share, share, 1e-14);
    }
    // Marginal payment z q^(-1/2) against utility 2 sqrt(q): q = 1/(4 theta^2),
    // buyer 1/(2 theta), efficient surplus 1/theta.
    const auto z = procurement_quantity(-2.0);
    EXPECT_DOUBLE_EQ(z.markup, 0.5);
    EXPECT_NEAR(z.share, 0.5, 1e-15);
    // eta = -3: z = 2/3, buyer (1/3)(3/2)(z/theta)^2 against S = theta^-2/2.
    EXPECT_NEAR(procurement_quantity(-3.0).share, 4.0 / 9.0, 1e-15);
}

TEST(ClosedForms, TruncatedParetoEtaTwo) {
    // Pareto(2, k): phi = v/2 below k, atom k^-2 at k.
    // Pi = ln k/4 + 1/2, S = ln k + 1/2, U = ln k/2.
    for (double k : {1e2, 1e3, 1e4, 1e8}) {
        const double lk = std::log(k);
        const auto r = truncated_pareto_eta2(2.0, k);
        EXPECT_NEAR(r.pi_over_s, (lk / 4.0 + 0.5) / (lk + 0.5), 1e-14);
        EXPECT_NEAR(r.u_over_s, (lk / 2.0) / (lk + 0.5), 1e-14);
    }
    // Continuity through alpha = 2.
    const auto below = truncated_pareto_eta2(2.0 - 1e-9, 1e3);
    const auto at = truncated_pareto_eta2(2.0, 1e3);
    EXPECT_NEAR(below.pi_over_s, at.pi_over_s, 1e-8);
    // alpha = 3 with k -> inf matches the untruncated closed form.
    const auto far = truncated_pareto_eta2(3.0, 1e12);
    EXPECT_NEAR(far.pi_over_s, pareto_profit_ratio(3.0, 2.0), 1e-9);
    EXPECT_NEAR(far.u_over_s, pareto_consumer_ratio(3.0, 2.0), 1e-9);
    // alpha = 1: phi = 0 below k, so Pi = k/2, S = k - 1/2, U = 0.
    const auto flat = truncated_pareto_eta2(1.0, 10.0);
    EXPECT_NEAR(flat.u_over_s, 0.0, 1e-15);
    EXPECT_NEAR(flat.pi_over_s, 10.0 / 19.0, 1e-15);
}

TEST(ClosedForms, LimitEvaluation) {
    const auto e = limit_at([](double x) { return std::sin(x) / x; }, 0.0, 1.0, 6);
    ASSERT_EQ(e.points.size(), 6u);
    EXPECT_NEAR(e.points.back(), 1e-6, 1e-20);
    EXPECT_NEAR(e.estimate, 1.0, 1e-11);
    EXPECT_LT(e.last_step, 1e-9);
    const auto inf = limit_at_infinity([](double x) { return 1.0 / x; }, 1.0, 5);
    EXPECT_DOUBLE_EQ(inf.points.back(), 1e5);
    EXPECT_DOUBLE_EQ(inf.estimate, 1e-5);
}
