#include "markup/closed_forms.hpp"
#include "markup/errors.hpp"
#include "markup/mechanisms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace markup;

TEST(Mechanisms, GuaranteeAllocation) {
    EXPECT_DOUBLE_EQ(guarantee_mechanism(2.0).allocation(1.0), 0.5);
    EXPECT_NEAR(guarantee_mechanism(3.0).allocation(9.0), std::sqrt(3.0), 1e-15);
    for (double eta : {1.5, 2.0, 4.0}) {
        EXPECT_EQ(guarantee_mechanism(eta).allocation(0.0), 0.0);
    }
}

TEST(Mechanisms, GuaranteeShape) {
    // Convex for eta < 2, linear at 2, concave above.
    for (double eta : {1.5, 2.0, 3.0}) {
        const auto M = guarantee_mechanism(eta);
        for (double v = 0.5; v < 10.0; v += 0.5) {
            const double a = M.allocation(v - 0.25);
            const double b = M.allocation(v);
            const double c = M.allocation(v + 0.25);
            EXPECT_LT(a, b);
            const double second = a - 2 * b + c;
            if (eta < 2.0) {
                EXPECT_GT(second, 0.0);
            } else if (eta > 2.0) {
                EXPECT_LT(second, 0.0);
            } else {
                EXPECT_NEAR(second, 0.0, 1e-14);
                EXPECT_NEAR(c - b, 0.125, 1e-14);
            }
        }
    }
}

TEST(Mechanisms, EnvelopeTransfer) {
    EXPECT_NEAR(envelope_transfer([](double v) { return v / 2.0; }, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(envelope_transfer([](double) { return 0.7; }, 3.0), 0.0, 1e-12);
    EXPECT_NEAR(envelope_transfer([](double v) { return v; }, 3.0), 4.5, 1e-12);
    EXPECT_NEAR(guarantee_mechanism(2.0).transfer(2.0), 1.0, 1e-14);
}

TEST(Mechanisms, GuaranteeTransferClosedFormMatchesQuadrature) {
    for (double eta : {1.5, 2.0, 3.0}) {
        const auto M = guarantee_mechanism(eta);
        const DirectMechanism plain("plain", [M](double v) { return M.allocation(v); });
        for (double v : {0.1, 1.0, 4.0}) {
            EXPECT_NEAR(M.transfer(v), plain.transfer(v), 1e-10 * std::max(1.0, M.transfer(v)));
        }
    }
}

TEST(Mechanisms, LernerIndexOfGuarantee) {
    for (double eta : {1.001, 2.0, 3.0}) {
        const auto tariff = marginal_price(guarantee_mechanism(eta), 0.0, eta < 1.01 ? 1.5 : 1e3);
        const IsoElasticCost c(eta);
        for (int i = 1; i <= 1000; ++i) {
            const double q = tariff.q_min() + (tariff.q_max() - tariff.q_min()) * i / 1001.0;
            const double p = tariff.price(q);
            EXPECT_NEAR((p - c.marginal(q)) / p, (eta - 1.0) / eta, 1e-9) << "eta=" << eta << " q=" << q;
        }
    }
    const auto t2 = marginal_price(guarantee_mechanism(2.0));
    EXPECT_NEAR(t2.price(1.5), 3.0, 1e-12);
    const auto t3 = marginal_price(guarantee_mechanism(3.0));
    EXPECT_NEAR(t3.price(2.0), 12.0, 1e-10);
}

TEST(Mechanisms, TariffRoundTrip) {
    // Re-integrating the marginal price reproduces the envelope transfer.
    const DirectMechanism M("sqrt", [](double v) { return std::sqrt(v); });
    const auto tariff = marginal_price(M, 0.0, 100.0);
    for (double v : {0.25, 1.0, 9.0, 64.0}) {
        const double q = M.allocation(v);
        EXPECT_NEAR(tariff.payment(q), M.transfer(v), 1e-8) << v;
        EXPECT_NEAR(tariff.price(q), v, 1e-9 * v);
    }
    EXPECT_NEAR(tariff.payment(tariff.q_min()), tariff.q_min() * 0.0, 1e-12);
}

TEST(Mechanisms, TariffReportsGaps) {
    const DirectMechanism step("step", [](double v) { return v < 1.0 ? 0.2 * v : 1.0 + v; }, {1.0});
    const auto tariff = marginal_price(step, 0.0, 3.0, 512);
    ASSERT_EQ(tariff.gaps().size(), 1u);
    EXPECT_NEAR(tariff.gaps()[0].q_lo, 0.2, 1e-9);
    EXPECT_NEAR(tariff.gaps()[0].q_hi, 2.0, 1e-9);
    EXPECT_THROW((void)tariff.price(1.0), DomainError);
    EXPECT_NEAR(tariff.price(2.5), 1.5, 1e-9);
}

TEST(Mechanisms, ConstantMarkup) {
    EXPECT_DOUBLE_EQ(markup_multiplier(2.0), 0.5);
    EXPECT_NEAR(markup_multiplier(5.0), 1.0 / 3.0, 1e-15);
    const auto mm = constant_markup_mechanism(GeneralConvexCost::iso_elastic(2.0));
    EXPECT_DOUBLE_EQ(mm.z, 0.5);
    // Coincides with the guarantee mechanism (z = 1/eta at eta = 2).
    const auto g = guarantee_mechanism(2.0);
    for (double v : {0.3, 1.0, 5.0}) {
        EXPECT_NEAR(mm.mechanism.allocation(v), g.allocation(v), 1e-12);
    }
    const auto quartic = constant_markup_mechanism(GeneralConvexCost::polynomial({0.0, 0.0, 0.5, 0.0, 0.25}, 4.0));
    EXPECT_NEAR(quartic.z, 1.0 / (std::sqrt(3.0) + 1.0), 1e-15);
    for (double v : {0.2, 1.0, 3.0}) {
        const double q = quartic.mechanism.allocation(v);
        EXPECT_NEAR(q + q * q * q, quartic.z * v, 1e-10);
    }
}

TEST(Mechanisms, ConstantMarkupWarnsBelowTwo) {
    const auto mm = constant_markup_mechanism(GeneralConvexCost::iso_elastic(1.5));
    EXPECT_FALSE(mm.warnings.empty());
    EXPECT_THROW(constant_markup_mechanism(GeneralConvexCost::polynomial({0.0, 0.0, 0.5, 0.0, 0.25}, 3.0)),
                 DomainError);
}

TEST(Mechanisms, UniformPrice) {
    EXPECT_DOUBLE_EQ(uniform_price_mechanism(-2.0).p_star, 2.0);
    EXPECT_DOUBLE_EQ(uniform_price_mechanism(-3.0).p_star, 1.5);
    EXPECT_NEAR(uniform_price_mechanism(-1e9).p_star, 1.0, 1e-8);
    EXPECT_THROW(uniform_price_mechanism(-0.5), DomainError);
}

TEST(Mechanisms, IcAuditGuarantee) {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(0.5 * i);
    }
    const auto a = ic_audit(guarantee_mechanism(2.0), grid);
    EXPECT_LE(a.max_ic_violation, 1e-9);
    EXPECT_LE(a.max_ir_violation, 1e-9);
}

TEST(Mechanisms, IcAuditDetectsTampering) {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(0.5 * i);
    }
    const auto g = guarantee_mechanism(2.0);
    const auto tampered = g.with_transfer([g](double v) { return g.transfer(v) + (v > 1.0 ? 0.1 : 0.0); }, "tampered");
    const auto a = ic_audit(tampered, grid);
    // Worst deviation: v = 1.5 reports 1, saving 0.1 - (1.5 - 1)^2/4.
    EXPECT_NEAR(a.max_ic_violation, 0.0375, 1e-12);
}

TEST(Mechanisms, IcAuditNullMechanism) {
    const auto null = DirectMechanism::from_menu("null", [](double) { return 0.0; }, [](double) { return 0.0; });
    const auto a = ic_audit(null, {0.0, 1.0, 2.0});
    EXPECT_EQ(a.max_ic_violation, 0.0);
    EXPECT_EQ(a.max_ir_violation, 0.0);
}

TEST(Mechanisms, MenuCsv) {
    std::ostringstream os;
    write_menu_csv(os, guarantee_mechanism(2.0), {1.0, 2.0});
    EXPECT_EQ(os.str(), "v,Q,T\n1,0.5,0.25\n2,1,1\n");
}
