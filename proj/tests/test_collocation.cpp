#include "srbf/collocation.hpp"
#include "srbf/problems.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace srbf;

namespace {
double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}  // namespace

TEST(Grid, CountsMatchTensorLayout) {
    const Box sq = Box::cube(2, -1.0, 1.0);
    for (auto [n, k1, k2] : {std::tuple{20, 324, 76}, {30, 784, 116}, {50, 2304, 196}}) {
        const auto g = make_grid(n, sq, 1.0);
        EXPECT_EQ(g.k1(), static_cast<std::size_t>(k1));
        EXPECT_EQ(g.k2(), static_cast<std::size_t>(k2));
    }
    const Box hc = Box::cube(4, -1.0, 1.0);
    EXPECT_EQ(make_grid(6, hc, 1.0).k1(), 256u);
    EXPECT_EQ(make_grid(6, hc, 1.0).k2(), 1040u);
    EXPECT_EQ(make_grid(8, hc, 1.0).k1(), 1296u);
    EXPECT_EQ(make_grid(8, hc, 1.0).k2(), 2800u);
    const auto line = make_grid(40, Box::cube(1, -1.0, 1.0), 1.0);
    EXPECT_EQ(line.k1(), 38u);
    EXPECT_EQ(line.k2(), 2u);
}

TEST(Grid, UniformWeightsAddUpToMeasures) {
    const auto g = make_grid(20, Box::cube(2, -1.0, 1.0), 1.0);
    EXPECT_NEAR(g.interior_weights.front(), 4.0 / 324.0, 1e-15);
    EXPECT_NEAR(g.boundary_weights.front(), 8.0 / 76.0, 1e-15);
    EXPECT_NEAR(sum(g.interior_weights), 4.0, 1e-12);
    EXPECT_NEAR(sum(g.boundary_weights), 8.0, 1e-12);
}

TEST(Grid, BoundaryPointsLieOnFacets) {
    const Box sq = Box::cube(2, -1.0, 1.0);
    const auto g = make_grid(7, sq, 1.0);
    for (const auto& x : g.boundary) EXPECT_FALSE(active_facets(x, sq).empty());
    for (const auto& x : g.interior) EXPECT_TRUE(active_facets(x, sq).empty());
    EXPECT_EQ(g.candidate_box.lo[0], -2.0);
    EXPECT_EQ(g.candidate_box.hi[1], 2.0);
}

TEST(Random, DeterministicInSeedAndInsideDomain) {
    const Box sq = Box::cube(2, -1.0, 1.0);
    const auto a = make_random(324, 76, sq, 1.0, 7);
    const auto b = make_random(324, 76, sq, 1.0, 7);
    const auto c = make_random(324, 76, sq, 1.0, 8);
    ASSERT_EQ(a.k1(), 324u);
    ASSERT_EQ(a.k2(), 76u);
    EXPECT_EQ(a.interior[5], b.interior[5]);
    EXPECT_NE(a.interior[5], c.interior[5]);
    for (const auto& x : a.interior) EXPECT_LE(x.cwiseAbs().maxCoeff(), 1.0);
    for (const auto& x : a.boundary) EXPECT_FALSE(active_facets(x, sq).empty());
    EXPECT_NEAR(sum(a.interior_weights), 4.0, 1e-12);
    EXPECT_NEAR(sum(a.boundary_weights), 8.0, 1e-12);
}

TEST(Weights, PenaltyScalesBoundaryRows) {
    const auto g = make_grid(20, Box::cube(2, -1.0, 1.0), 1e3);
    const auto rows = residual_rows(g, BoundaryMode::L2Penalty);
    const auto w = weight_matrix(g, rows);
    EXPECT_NEAR(w.diag[0], 4.0 / 324.0, 1e-15);
    EXPECT_NEAR(w.diag[static_cast<Eigen::Index>(rows.size()) - 1], 1e3 * 8.0 / 76.0, 1e-12);
}

TEST(Rows, BoundaryTreatments) {
    const auto g = make_grid(20, Box::cube(2, -1.0, 1.0), 1.0);
    EXPECT_EQ(boundary_rows(g, BoundaryMode::L2Penalty).size(), 76u);
    const auto h1 = boundary_rows(g, BoundaryMode::H1Penalty);
    EXPECT_EQ(h1.size(), 76u + 72u);
    std::size_t tangential = 0;
    for (const auto& r : h1)
        if (r.kind == RowKind::BoundaryTangent) {
            ++tangential;
            EXPECT_NEAR(r.tangent.norm(), 1.0, 1e-15);
        }
    EXPECT_EQ(tangential, 72u);
    EXPECT_TRUE(boundary_rows(g, BoundaryMode::Mask).empty());
    EXPECT_EQ(residual_rows(g, BoundaryMode::Mask).size(), 324u);
}
