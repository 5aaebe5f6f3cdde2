#include "srbf/reference.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace srbf;
using srbf::testing::point;

TEST(EikonalReference, BoundaryAndSymmetry) {
    const EikonalReference ref(0.1, 200);
    EXPECT_NEAR(ref.node(0, 57), 0.0, 1e-12);
    EXPECT_NEAR(ref.node(200, 13), 0.0, 1e-12);
    EXPECT_NEAR(ref(point({0.3, -0.6})), ref(point({-0.6, 0.3})), 1e-10);
    EXPECT_NEAR(ref(point({0.3, -0.6})), ref(point({-0.3, 0.6})), 1e-10);
}

TEST(EikonalReference, SatisfiesThePdeOnItsGrid) {
    // |grad u|^2 - eps lap u = 1 by centered differences at interior nodes
    const double eps = 0.5;
    const int n = 200;
    const EikonalReference ref(eps, n);
    const double h = 2.0 / n;
    double worst = 0.0;
    for (int i = 20; i <= 180; i += 16) {
        for (int j = 20; j <= 180; j += 16) {
            const double ux = (ref.node(i + 1, j) - ref.node(i - 1, j)) / (2 * h);
            const double uy = (ref.node(i, j + 1) - ref.node(i, j - 1)) / (2 * h);
            const double lap = (ref.node(i + 1, j) + ref.node(i - 1, j) + ref.node(i, j + 1) +
                                ref.node(i, j - 1) - 4 * ref.node(i, j)) / (h * h);
            worst = std::max(worst, std::abs(ux * ux + uy * uy - eps * lap - 1.0));
        }
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(EikonalReference, ApproachesDistanceForSmallViscosity) {
    const EikonalReference ref(0.02, 400);
    for (const Point& x : {point({0.0, 0.0}), point({0.5, 0.1}), point({-0.2, 0.7})})
        EXPECT_NEAR(ref(x), eikonal_viscosity_limit(x), 0.05);
    EXPECT_DOUBLE_EQ(eikonal_viscosity_limit(point({0.25, -0.5})), 0.5);
}

TEST(BurgersExact, InitialAndBoundaryValues) {
    const BurgersExact u(0.02);
    EXPECT_NEAR(u(0.0, 0.5), -1.0, 1e-14);
    EXPECT_NEAR(u(0.4, 1.0), 0.0, 1e-8);
    EXPECT_NEAR(u(0.4, -1.0), 0.0, 1e-8);
    EXPECT_NEAR(u(0.7, 0.3), -u(0.7, -0.3), 1e-9);
    EXPECT_NEAR(u(0.7, 0.0), 0.0, 1e-9);
}

TEST(BurgersExact, SatisfiesViscousBurgers) {
    const double nu = 0.05;
    const BurgersExact u(nu);
    const double h = 1e-3;
    for (auto [t, x] : {std::pair{0.2, 0.4}, {0.5, -0.3}, {0.8, 0.1}}) {
        const double ut = (u(t + h, x) - u(t - h, x)) / (2 * h);
        const double ux = (u(t, x + h) - u(t, x - h)) / (2 * h);
        const double uxx = (u(t, x + h) - 2 * u(t, x) + u(t, x - h)) / (h * h);
        EXPECT_NEAR(ut + u(t, x) * ux - nu * uxx, 0.0, 1e-3) << "t=" << t << " x=" << x;
    }
}

TEST(BurgersExact, ShortTimeMatchesHeatLikeDecay) {
    // u_t = -u u_x + nu u_xx at t = 0 for u = -sin(pi x)
    const double nu = 0.02;
    const BurgersExact u(nu);
    const double pi = std::numbers::pi;
    const double x = 0.25;
    const double u0 = -std::sin(pi * x), ux = -pi * std::cos(pi * x), uxx = pi * pi * std::sin(pi * x);
    const double dt = 1e-4;
    EXPECT_NEAR((u(dt, x) - u0) / dt, -u0 * ux + nu * uxx, 5e-3);
}
