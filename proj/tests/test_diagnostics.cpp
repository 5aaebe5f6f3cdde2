#include "srbf/diagnostics.hpp"
#include "srbf/io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace srbf;
using srbf::testing::point;
using srbf::testing::random_network;

TEST(ErrorNorms, ConstantOffset) {
    const auto test = make_grid(100, Box::cube(2, -1.0, 1.0), 1.0);
    const auto pts = all_points(test);
    ASSERT_EQ(pts.size(), 10000u);
    const double delta = 0.003;
    const auto e = error_norms([&](const Point&) { return 1.0 + delta; },
                               [](const Point&) { return 1.0; }, pts, 4.0 / 10000.0);
    EXPECT_NEAR(e.linf, delta, 1e-15);
    EXPECT_NEAR(e.l2, 2.0 * delta, 1e-14);
}

TEST(ErrorNorms, DefaultTestGrids) {
    EXPECT_EQ(default_test_points(1), 200);
    EXPECT_EQ(default_test_points(2), 100);
    EXPECT_EQ(default_test_points(4), 20);
}

TEST(Metrics, EmptyNetworkErrorIsSolutionNorm) {
    const PdeProblem p = make_problem("semilinear2d_twobump", ProblemOptions{});
    const ResidualSystem sys(make_grid(10, p.domain, 1e3), p);
    const auto test = make_grid(30, p.domain, 1e3);
    const ScalarField exact = [&](const Point& x) { return p.exact(x).value; };
    const auto m = error_metrics(RbfNetwork::empty(2), sys, test, exact);
    double sum = 0.0, mx = 0.0;
    for (const auto& x : all_points(test)) {
        sum += exact(x) * exact(x);
        mx = std::max(mx, std::abs(exact(x)));
    }
    EXPECT_NEAR(m.l2_error, std::sqrt(4.0 / 900.0 * sum), 1e-12);
    EXPECT_NEAR(m.linf_error, mx, 1e-14);
    EXPECT_NEAR(m.loss_train, evaluate_residual(RbfNetwork::empty(2), sys, false).loss(sys.weights()), 1e-12);
    EXPECT_EQ(m.n_kernels, 0u);
    EXPECT_TRUE(std::isnan(error_metrics(RbfNetwork::empty(2), sys, test, {}).l2_error));
}

TEST(Oracles, DualOracleAgreesOnEveryProblem) {
    std::mt19937_64 rng(21);
    for (const auto& name : problem_names()) {
        ProblemOptions o;
        o.boundary_mode = name == "eikonal" || name == "burgers" ? BoundaryMode::Mask : BoundaryMode::L2Penalty;
        const PdeProblem p = make_problem(name, o);
        const ResidualSystem sys(make_grid(p.dim == 4 ? 4 : 8, p.domain, 10.0), p);
        const RbfNetwork net = random_network(p.dim, 3, rng);
        const RbfNetwork probe = random_network(p.dim, 1, rng);
        EXPECT_LE(fd_dual_oracle(net, sys, probe.params(0)).deviation, 1e-5) << name;
    }
}

TEST(Oracles, DualOracleRejectsForeignFeatureFamily) {
    const PdeProblem p = make_problem("semilinear1d", ProblemOptions{});
    const ResidualSystem sys(make_grid(8, p.domain, 10.0), p);
    FeatureParams omega;
    omega.y = point({0.1});
    omega.s_exp = 9.0;
    EXPECT_THROW(fd_dual_oracle(RbfNetwork::empty(1), sys, omega), UsageError);
}

TEST(MetricsCsv, HeaderAndRow) {
    MetricsRow r;
    r.config_hash = "abc";
    r.problem = "eikonal";
    r.k1 = 784;
    r.k2 = 116;
    r.alpha = 1e-6;
    r.lambda = 1.0;
    r.metrics.n_kernels = 71;
    const std::string line = metrics_csv_line(r);
    const std::string header = metrics_csv_header();
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(header.begin(), header.end(), ','));
    EXPECT_EQ(line.rfind("abc,0,eikonal,784,116,1e-06,1,", 0), 0u);
}

TEST(Hash, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Io, AtomicWriteAndRoundTripFormatting) {
    const auto dir = std::filesystem::temp_directory_path() / "srbf_io_test";
    std::filesystem::remove_all(dir);
    write_file_atomic(dir / "sub" / "x.txt", "hello\n");
    std::ifstream in(dir / "sub" / "x.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "hello\n");
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir / "sub"), {}), 1);
    std::filesystem::remove_all(dir);
    for (double v : {0.1, 1e-300, -3.14159265358979, 6.02e23})
        EXPECT_EQ(std::stod(format_double(v)), v);
}
