#include "markup/errors.hpp"
#include "markup/mechanisms.hpp"
#include "markup/screening.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace markup;

namespace {

// 0.5 U(0,1) + 0.5 U(1,3): phi drops from 0 to -1 at v = 1.
ValueDistribution dip() {
    return ValueDistribution::mixture({ValueDistribution::uniform(0.0, 1.0), ValueDistribution::uniform(1.0, 3.0)},
                                      {0.5, 0.5});
}

double dip_quantile(double x) { return x <= 0.5 ? 2.0 * x : 1.0 + 4.0 * (x - 0.5); }

// Ironed level m of dip(): phi(x) = 4x - 2 below x = 1/2 and 8x - 5 above;
// the interval [x1, x2] has phi(x1) = phi(x2) = m and mean m.
struct DipIroning {
    double m;
    double x1;
    double x2;
};
DipIroning dip_ironing() {
    auto excess = [](double m) {
        const double x1 = (m + 2.0) / 4.0;
        const double x2 = (m + 5.0) / 8.0;
        const double left = 2.0 * (0.25 - x1 * x1) - 2.0 * (0.5 - x1);
        const double right = 4.0 * (x2 * x2 - 0.25) - 5.0 * (x2 - 0.5);
        return left + right - m * (x2 - x1);
    };
    // excess is decreasing: positive at m = -1, negative at m = 0.
    double lo = -1.0;
    double hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    const double m = 0.5 * (lo + hi);
    return {m, (m + 2.0) / 4.0, (m + 5.0) / 8.0};
}

}  // namespace

TEST(Screening, VirtualValues) {
    EXPECT_DOUBLE_EQ(virtual_value(ValueDistribution::pareto(2.0), 4.0), 2.0);
    EXPECT_DOUBLE_EQ(virtual_value(ValueDistribution::uniform(0.0, 1.0), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(virtual_value(ValueDistribution::uniform(0.0, 1.0), 0.5), 0.0);
    for (double a : {1.5, 3.0}) {
        EXPECT_NEAR(virtual_value(ValueDistribution::pareto(a), 7.0), (a - 1.0) / a * 7.0, 1e-13);
    }
    EXPECT_THROW((void)virtual_value(ValueDistribution::truncated_pareto(2.0, 10.0), 10.0), DomainError);
    EXPECT_THROW((void)virtual_value(ValueDistribution::point_mass(1.0), 1.0), DomainError);
}

TEST(Screening, RegularUniformHasNoIroning) {
    const auto curve = iron(ValueDistribution::uniform(0.0, 1.0));
    EXPECT_TRUE(curve.ironed_intervals().empty());
    for (double v = 0.0; v <= 1.0; v += 0.01) {
        EXPECT_NEAR(curve.phi_bar(v), 2.0 * v - 1.0, 1e-9);
    }
}

TEST(Screening, ParetoHasNoIroning) {
    const auto curve = iron(ValueDistribution::pareto(2.0));
    EXPECT_TRUE(curve.ironed_intervals().empty());
    for (double v : {1.0, 1.5, 10.0, 1e3}) {
        EXPECT_NEAR(curve.phi_bar(v), v / 2.0, 1e-9 * v);
    }
}

TEST(Screening, IroningMatchesJarvisHull) {
    const auto F = dip();
    const auto curve = iron(F, 10000);
    // Independent hull on the same uniform quantile grid.
    const std::size_t n = 10000;
    std::vector<double> x(n + 1);
    std::vector<double> h(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = static_cast<double>(i) / n;
        h[i] = -(1.0 - x[i]) * dip_quantile(x[i]);
    }
    const auto slopes = oracle::hull_cell_slopes(x, h);
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // Skip the two cells where the hull changes slope.
        if (std::abs(slopes[i - 1] - slopes[i]) > 1e-6 || std::abs(slopes[i + 1] - slopes[i]) > 1e-6) {
            continue;
        }
        const double v = dip_quantile((x[i] + x[i + 1]) / 2.0);
        sup = std::max(sup, std::abs(curve.phi_bar(v) - slopes[i]));
    }
    EXPECT_LE(sup, 1e-4);
}

TEST(Screening, IronedIntervalMatchesConditionalMean) {
    const auto curve = iron(dip(), 10000);
    ASSERT_EQ(curve.ironed_intervals().size(), 1u);
    const auto& iv = curve.ironed_intervals()[0];
    const auto ref = dip_ironing();
    EXPECT_NEAR(iv.value, ref.m, 1e-7);
    EXPECT_NEAR(iv.x_lo, ref.x1, 1e-6);
    EXPECT_NEAR(iv.x_hi, ref.x2, 1e-6);
    EXPECT_NEAR(iv.v_lo, dip_quantile(ref.x1), 1e-5);
    EXPECT_NEAR(iv.v_hi, dip_quantile(ref.x2), 1e-5);
    EXPECT_TRUE(curve.is_ironed(1.0));
    EXPECT_FALSE(curve.is_ironed(0.1));
    EXPECT_NEAR(curve.phi_bar(1.0), ref.m, 1e-7);
    // Outside the interval phi_bar = phi.
    EXPECT_NEAR(curve.phi_bar(0.2), 2 * 0.2 - 2.0, 1e-9);
    EXPECT_NEAR(curve.phi_bar(2.8), 2 * 2.8 - 3.0, 1e-9);
}

TEST(Screening, PhiBarIsNondecreasing) {
    for (const auto& F : {dip(), ValueDistribution::binary(1.0, 2.0, 0.3), ValueDistribution::power(0.5),
                          ValueDistribution::truncated_pareto(2.0, 50.0),
                          ValueDistribution::discrete({0.5, 1.0, 1.1, 3.0}, {0.1, 0.5, 0.1, 0.3})}) {
        const auto curve = iron(F, 4000);
        double prev = -1e300;
        const double hi = F.upper();
        for (int i = 0; i <= 3000; ++i) {
            const double v = F.lower() + (hi - F.lower()) * i / 3000.0;
            const double p = curve.phi_bar(v);
            EXPECT_GE(p, prev - 1e-10) << F.describe() << " v=" << v;
            prev = p;
        }
    }
}

TEST(Screening, IroningDominance) {
    // int_t phi f = t (1 - F(t)); ironing can only raise the tail integral.
    const auto F = dip();
    const auto curve = iron(F, 10000);
    for (double t : {0.2, 0.6, 0.9, 1.0, 1.2, 1.8, 2.5}) {
        std::vector<long double> nodes{t};
        for (double b : {1.0, curve.ironed_intervals()[0].v_hi}) {
            if (b > nodes.back()) {
                nodes.push_back(b);
            }
        }
        nodes.push_back(3.0);
        const long double ironed = oracle::integrate_pieces(
            [&](long double v) { return curve.phi_bar(static_cast<double>(v)) * F.density(static_cast<double>(v)); },
            nodes, 1e-12L);
        EXPECT_GE(static_cast<double>(ironed), t * (1.0 - F.cdf(t)) - 1e-8) << "t=" << t;
    }
}

TEST(Screening, NarrowIntervalWarning) {
    const auto curve = iron(dip(), 20);
    bool warned = false;
    for (const auto& w : curve.warnings()) {
        warned = warned || w.find("cells") != std::string::npos;
    }
    EXPECT_TRUE(warned);
    EXPECT_TRUE(iron(dip(), 10000).warnings().empty());
}

TEST(Screening, BayesOptimalPareto) {
    for (double a : {2.0, 3.0}) {
        for (double eta : {1.5, 2.0, 3.0}) {
            if (!(a > eta / (eta - 1.0))) {
                continue;
            }
            const auto M = bayes_optimal_mechanism(ValueDistribution::pareto(a), IsoElasticCost(eta));
            for (double v : {1.0, 2.0, 30.0}) {
                EXPECT_NEAR(M.allocation(v), std::pow((a - 1.0) / a * v, 1.0 / (eta - 1.0)),
                            1e-9 * std::max(1.0, M.allocation(v)));
            }
        }
    }
    const auto M = bayes_optimal_mechanism(ValueDistribution::truncated_pareto(2.0, 1e6), IsoElasticCost(2.0));
    EXPECT_NEAR(M.allocation(2.0), 1.0, 1e-9);
}

TEST(Screening, BayesOptimalUniform) {
    const auto M = bayes_optimal_mechanism(ValueDistribution::uniform(0.0, 1.0), IsoElasticCost(2.0));
    EXPECT_EQ(M.allocation(0.5), 0.0);
    EXPECT_EQ(M.allocation(0.3), 0.0);
    EXPECT_NEAR(M.allocation(1.0), 1.0, 1e-9);
    EXPECT_NEAR(M.allocation(0.8), 0.6, 1e-9);
    EXPECT_NEAR(exclusion_threshold(iron(ValueDistribution::uniform(0.0, 1.0))), 0.5, 1e-9);
    EXPECT_EQ(M.transfer(0.4), 0.0);
}

TEST(Screening, BayesOptimalIsMonotone) {
    for (const auto& F : {dip(), ValueDistribution::binary(1.0, 2.0, 0.3), ValueDistribution::power(0.5),
                          ValueDistribution::truncated_pareto(2.5, 100.0)}) {
        const auto M = bayes_optimal_mechanism(F, IsoElasticCost(2.0), 4000);
        double prev = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double v = F.upper() * i / 2000.0;
            const double q = M.allocation(v);
            EXPECT_GE(q, prev - 1e-12) << F.describe() << " v=" << v;
            prev = q;
        }
    }
}

TEST(Screening, BayesOptimalIsIncentiveCompatible) {
    const auto M = bayes_optimal_mechanism(dip(), IsoElasticCost(2.0));
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) {
        grid.push_back(3.0 * i / 300.0);
    }
    const auto audit = ic_audit(M, grid);
    EXPECT_LE(audit.max_ic_violation, 1e-8);
    EXPECT_LE(audit.max_ir_violation, 1e-8);
}

TEST(Screening, ConvergesToGuaranteeOnTruncatedPareto) {
    const auto G = guarantee_mechanism(2.0);
    for (double k : {1e2, 1e3, 1e4}) {
        const auto M = bayes_optimal_mechanism(ValueDistribution::truncated_pareto(2.0, k), IsoElasticCost(2.0));
        double sup = 0.0;
        for (int i = 0; i <= 500; ++i) {
            const double v = std::pow(k, 0.5 * i / 500.0);
            sup = std::max(sup, std::abs(M.allocation(v) - G.allocation(v)));
        }
        EXPECT_LE(sup, 1.0 / std::sqrt(k)) << "k=" << k;
    }
}

TEST(Screening, MarkupCurve) {
    const auto p = bayes_markup_curve(ValueDistribution::pareto(2.0), IsoElasticCost(2.0));
    for (double v : {1.0, 3.0, 100.0}) {
        EXPECT_NEAR(p(v), 0.5, 1e-12);
    }
    const auto u = bayes_markup_curve(ValueDistribution::uniform(0.0, 1.0), IsoElasticCost(2.0));
    EXPECT_NEAR(u(1.0), 0.0, 1e-15);
    EXPECT_NEAR(u(0.5), 1.0, 1e-15);
    const auto d = bayes_markup_curve(dip(), IsoElasticCost(2.0));
    EXPECT_THROW((void)d(1.0), DomainError);
}

TEST(Screening, VirtualValueCsv) {
    std::ostringstream os;
    write_virtual_value_csv(os, iron(ValueDistribution::uniform(0.0, 1.0)), {0.25});
    EXPECT_EQ(os.str(), "v,phi,phi_bar,ironed\n0.25,-0.5,-0.5,0\n");
}
