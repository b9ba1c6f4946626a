#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "cavityspec/quadrature.hpp"

using namespace cavityspec;

TEST(GaussLegendre, IntegratesPolynomialsUpToDegree2nMinus1) {
    for (int n : {1, 2, 5, 16, 32, 64}) {
        const auto& r = quad::gauss_legendre(n);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " k=" << k;
        }
    }
}

TEST(GaussLegendre, NodesAscendingAndSymmetric) {
    const auto& r = quad::gauss_legendre(33);
    for (int i = 1; i < 33; ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    for (int i = 0; i < 33; ++i) {
        EXPECT_NEAR(r.nodes[i], -r.nodes[32 - i], 1e-15);
        EXPECT_DOUBLE_EQ(r.weights[i], r.weights[32 - i]);
    }
    EXPECT_THROW(quad::gauss_legendre(0), DomainError);
}

TEST(GeometricPanels, CoverTheIntervalAndHalveTowardsLo) {
    const auto p = quad::geometric_panels(0.01, 1.0);
    ASSERT_FALSE(p.empty());
    EXPECT_DOUBLE_EQ(p.front().second, 1.0);
    EXPECT_DOUBLE_EQ(p.back().first, 0.01);
    for (std::size_t i = 1; i < p.size(); ++i) EXPECT_DOUBLE_EQ(p[i].second, p[i - 1].first);
    EXPECT_DOUBLE_EQ(p[0].first, 0.5);
    EXPECT_TRUE(quad::geometric_panels(1.0, 1.0).empty());
    const auto z = quad::geometric_panels(0.0, 1.0, 10);
    EXPECT_EQ(z.size(), 11u);
    EXPECT_EQ(z.back().first, 0.0);
}

TEST(IntegrateDoubling, EndpointSquareRootSingularityViaSubstitution) {
    // ∫_0^1 W^{-1/2} cos(W) dW with W = u^2 becomes ∫_0^1 2 cos(u^2) du
    auto f = [](double u) { return 2.0 * std::cos(u * u); };
    const auto panels = quad::geometric_panels(0.0, 1.0);
    const double got = quad::integrate_doubling(f, panels, 1e-12);
    auto g = [](double w) { return std::cos(w) / std::sqrt(w); };
    const double ref = boost::math::quadrature::tanh_sinh<double>().integrate(g, 0.0, 1.0);
    EXPECT_NEAR(got, ref, 1e-12);
}

TEST(IntegrateDoubling, ThrowsWhenToleranceIsOutOfReach) {
    auto f = [](double x) { return std::sin(200.0 * x); };
    const std::vector<quad::Panel> panels{{0.0, 10.0}};
    EXPECT_THROW(quad::integrate_doubling(f, panels, 1e-14, 4, 2), NumericalError);
}
