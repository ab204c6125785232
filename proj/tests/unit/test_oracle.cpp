#include "markup/errors.hpp"
#include "markup/functionals.hpp"
#include "markup/screening.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace markup;

namespace {

std::vector<double> uniform_grid(double hi, std::size_t levels) {
    std::vector<double> g;
    for (std::size_t j = 0; j < levels; ++j) {
        g.push_back(hi * static_cast<double>(j) / static_cast<double>(levels - 1));
    }
    return g;
}

}  // namespace

TEST(Oracle, SingleTypeExtractsFirstBest) {
    const auto r = discrete_oracle({{1.0}, {1.0}, IsoElasticCost(2.0), uniform_grid(2.0, 41)});
    EXPECT_NEAR(r.profit, 0.5, 1e-15);
    EXPECT_NEAR(r.allocation[0], 1.0, 1e-15);
    EXPECT_NEAR(r.transfers[0], 1.0, 1e-15);
    EXPECT_TRUE(r.modes_agree);
}

TEST(Oracle, TwoTypesExcludeLowType) {
    const auto r = discrete_oracle({{1.0, 2.0}, {0.5, 0.5}, IsoElasticCost(2.0), uniform_grid(3.0, 61)});
    EXPECT_NEAR(r.reduced_profit, 1.0, 1e-15);
    EXPECT_NEAR(r.profit, 1.0, 1e-12);
    EXPECT_EQ(r.allocation[0], 0.0);
    EXPECT_NEAR(r.allocation[1], 2.0, 1e-12);
    EXPECT_NEAR(r.ironed_virtual_values[0], 0.0, 1e-15);
    EXPECT_NEAR(r.ironed_virtual_values[1], 2.0, 1e-15);
    EXPECT_TRUE(r.modes_agree);
}

TEST(Oracle, ExhaustiveMatchesBruteForce) {
    const std::vector<double> v{0.8, 1.0, 1.6, 2.0};
    const std::vector<double> f{0.1, 0.4, 0.2, 0.3};
    for (double eta : {1.5, 2.0, 3.0}) {
        const IsoElasticCost cost(eta);
        const auto grid = uniform_grid(1.2 * efficient_quality(2.0, cost), 15);
        const auto r = discrete_oracle({v, f, cost, grid}, OracleMode::exhaustive);
        const auto ref = oracle::brute_force_screening(v, f, grid, [&](double q) { return cost.cost(q); });
        EXPECT_NEAR(r.profit, ref.profit, 1e-12) << "eta=" << eta;
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_EQ(r.allocation[i], ref.q[i]);
            EXPECT_NEAR(r.transfers[i], ref.t[i], 1e-12);
        }
    }
}

TEST(Oracle, ReducedDominatesAndModesAgree) {
    const std::vector<double> v{0.5, 1.0, 1.1, 3.0};
    const std::vector<double> f{0.1, 0.5, 0.1, 0.3};
    const auto r = discrete_oracle({v, f, IsoElasticCost(2.0), uniform_grid(3.3, 100)});
    EXPECT_LE(r.profit, r.reduced_profit * (1.0 + 1e-9));
    EXPECT_TRUE(r.modes_agree);
    EXPECT_LT(r.relative_gap, 1e-3);
    // Pooling: ironed values are nondecreasing and tie on a block.
    for (std::size_t i = 1; i < v.size(); ++i) {
        EXPECT_GE(r.ironed_virtual_values[i], r.ironed_virtual_values[i - 1] - 1e-15);
    }
}

TEST(Oracle, ReducedMatchesContinuousSolverOnAtoms) {
    const std::vector<double> v{0.5, 1.0, 1.1, 3.0};
    const std::vector<double> f{0.1, 0.5, 0.1, 0.3};
    const IsoElasticCost cost(2.0);
    const auto r = discrete_oracle({v, f, cost, {}}, OracleMode::reduced);
    const auto D = ValueDistribution::discrete(v, f);
    const auto M = bayes_optimal_mechanism(D, cost);
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_NEAR(M.allocation(v[i]), r.reduced_allocation[i], 1e-9) << i;
    }
    EXPECT_NEAR(mechanism_profit(D, M, cost).value, r.reduced_profit, 1e-9);
}

TEST(Oracle, TieBreakIsLexicographicallySmallest) {
    // q - q^2/2 is 0.375 at both q = 0.5 and q = 1.5.
    const auto r = discrete_oracle({{1.0}, {1.0}, IsoElasticCost(2.0), {0.0, 0.5, 1.5}}, OracleMode::exhaustive);
    EXPECT_EQ(r.allocation[0], 0.5);
}

TEST(Oracle, WarnsWhenGridTooCoarse) {
    const auto r = discrete_oracle({{1.0, 2.0}, {0.5, 0.5}, IsoElasticCost(2.0), uniform_grid(1.0, 11)});
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Oracle, RefusesOversizedRequests) {
    std::vector<double> v;
    std::vector<double> f;
    for (int i = 1; i <= 13; ++i) {
        v.push_back(i);
        f.push_back(1.0 / 13.0);
    }
    f.back() = 1.0 - 12.0 / 13.0;
    EXPECT_THROW(discrete_oracle({v, f, IsoElasticCost(2.0), uniform_grid(10.0, 3)}), DomainError);
    v.pop_back();
    f.assign(12, 1.0 / 12.0);
    EXPECT_THROW(discrete_oracle({v, f, IsoElasticCost(2.0), uniform_grid(10.0, 40)}), DomainError);
    EXPECT_NO_THROW(discrete_oracle({v, f, IsoElasticCost(2.0), uniform_grid(10.0, 40)}, OracleMode::reduced));
}

TEST(Oracle, MonotoneVectorCount) {
    EXPECT_EQ(monotone_vector_count(3, 2), 6.0);
    EXPECT_EQ(monotone_vector_count(18, 10), 8436285.0);
    EXPECT_EQ(monotone_vector_count(5, 1), 5.0);
}

TEST(Oracle, DiscretizedParetoTwo) {
    const auto P = ValueDistribution::pareto(2.0);
    const std::size_t n = 10;
    std::vector<double> v;
    std::vector<double> f(n, 1.0 / n);
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(P.quantile((i + 0.5) / n));
    }
    const IsoElasticCost cost(2.0);
    const auto r = discrete_oracle({v, f, cost, uniform_grid(1.05 * v.back(), 18)}, OracleMode::exhaustive);
    const auto D = ValueDistribution::discrete(v, f);
    const double continuous = mechanism_profit(D, bayes_optimal_mechanism(D, cost), cost).value;
    EXPECT_LE(std::abs(continuous - r.profit) / continuous, 0.02);
}

TEST(Oracle, RejectsMalformedInstances) {
    EXPECT_THROW(discrete_oracle({{2.0, 1.0}, {0.5, 0.5}, IsoElasticCost(2.0), {0.0, 1.0}}), DomainError);
    EXPECT_THROW(discrete_oracle({{1.0, 2.0}, {0.5, 0.4}, IsoElasticCost(2.0), {0.0, 1.0}}), DomainError);
    EXPECT_THROW(discrete_oracle({{1.0, 2.0}, {0.5, 0.5}, IsoElasticCost(2.0), {0.5, 1.0}}), DomainError);
}
