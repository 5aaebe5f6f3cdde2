#include "srbf/diagnostics.hpp"
#include "srbf/network.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace srbf;
using srbf::testing::point;
using srbf::testing::random_network;

TEST(Network, JetIsWeightedSumOfFeatures) {
    std::mt19937_64 rng(1);
    const RbfNetwork net = random_network(2, 4, rng);
    const Point x = point({0.1, 0.6});
    double v = 0.0;
    for (std::size_t n = 0; n < net.size(); ++n) v += net.nodes[n].c * eval_feature(x, net.params(n));
    EXPECT_NEAR(eval_value(net, x), v, 1e-14);
    const Jet j = eval_jet(net, x);
    const double h = 1e-6;
    Point xp = x, xm = x;
    xp[1] += h;
    xm[1] -= h;
    EXPECT_NEAR(j.grad[1], (eval_value(net, xp) - eval_value(net, xm)) / (2 * h), 1e-7);
}

TEST(Network, VariableLayout) {
    std::mt19937_64 rng(2);
    const RbfNetwork net = random_network(3, 5, rng);
    EXPECT_EQ(net.num_variables(), 25u);
    EXPECT_EQ(omega_column(net, 0), 5u);
    EXPECT_EQ(omega_column(net, 2), 13u);
    EXPECT_DOUBLE_EQ(net.s_exp, 5.01);
}

TEST(Network, EmptyNetworkResidualIsMinusData) {
    const PdeProblem p = make_problem("semilinear1d", ProblemOptions{});
    const ResidualSystem sys(make_grid(10, p.domain, 1.0), p);
    const auto st = evaluate_residual(RbfNetwork::empty(1), sys, true);
    ASSERT_EQ(st.R.size(), 10);
    const Point xb = sys.point(sys.size() - 1);
    EXPECT_NEAR(st.R[st.R.size() - 1], -p.exact(xb).value, 1e-14);
    const VectorX& w = sys.weights();
    EXPECT_NEAR(st.loss(w), 0.5 * (st.R.array().square() * w.array()).sum(), 1e-15);
}

class JacobianOracle : public ::testing::TestWithParam<std::tuple<const char*, BoundaryMode, int>> {};

TEST_P(JacobianOracle, AgreesWithFiniteDifferences) {
    auto [name, mode, n] = GetParam();
    ProblemOptions o;
    o.boundary_mode = mode;
    const PdeProblem p = make_problem(name, o);
    const ResidualSystem sys(make_grid(n, p.domain, 10.0), p);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 2; ++t) {
        const RbfNetwork net = random_network(p.dim, 3, rng);
        EXPECT_LE(fd_jacobian_oracle(net, sys).deviation, 1e-5);
    }
}

TEST_P(JacobianOracle, FlippedHessianIsDetected) {
    auto [name, mode, n] = GetParam();
    ProblemOptions o;
    o.boundary_mode = mode;
    const PdeProblem p = make_problem(name, o);
    const ResidualSystem sys(make_grid(n, p.domain, 10.0), p);
    std::mt19937_64 rng(12);
    const RbfNetwork net = random_network(p.dim, 3, rng);
    AssemblyOptions bad;
    bad.flip_hessian_sign = true;
    EXPECT_GT(fd_jacobian_oracle(net, sys, bad).deviation, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(
    Problems, JacobianOracle,
    ::testing::Values(std::tuple{"semilinear1d", BoundaryMode::L2Penalty, 10},
                      std::tuple{"semilinear2d_twobump", BoundaryMode::H1Penalty, 6},
                      std::tuple{"sines2d", BoundaryMode::Mask, 6},
                      std::tuple{"semilinear4d", BoundaryMode::L2Penalty, 4},
                      std::tuple{"eikonal", BoundaryMode::Mask, 6},
                      std::tuple{"burgers", BoundaryMode::Mask, 10}));

TEST(Network, SolutionDumpHasOneRowPerNode) {
    std::mt19937_64 rng(3);
    const RbfNetwork net = random_network(2, 3, rng);
    const auto path = std::filesystem::temp_directory_path() / "srbf_dump_test.csv";
    write_solution_dump(path, net);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "c,y_1,y_2,sigma");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    std::filesystem::remove(path);
}
