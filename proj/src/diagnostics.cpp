#include "srbf/diagnostics.hpp"

#include "srbf/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace srbf {

ErrorNorms error_norms(const ScalarField& approx, const ScalarField& exact,
                       const std::vector<Point>& pts, double weight) {
    ErrorNorms e;
    double sum = 0.0;
    for (const auto& x : pts) {
        const double d = approx(x) - exact(x);
        sum += weight * d * d;
        e.linf = std::max(e.linf, std::abs(d));
    }
    e.l2 = std::sqrt(sum);
    return e;
}

std::vector<Point> all_points(const CollocationSet& pts) {
    std::vector<Point> out = pts.interior;
    out.insert(out.end(), pts.boundary.begin(), pts.boundary.end());
    return out;
}

int default_test_points(int dim) {
    switch (dim) {
        case 1: return 200;
        case 2: return 100;
        case 3: return 40;
        default: return 20;
    }
}

Metrics error_metrics(const RbfNetwork& net, const ResidualSystem& train,
                      const CollocationSet& test, const ScalarField& exact) {
    Metrics m;
    m.n_kernels = net.size();
    m.loss_train = evaluate_residual(net, train, false).loss(train.weights());

    CollocationSet test_pts = test;
    test_pts.lambda = train.points().lambda;
    const ResidualSystem test_sys(test_pts, train.problem());
    m.loss_test = evaluate_residual(net, test_sys, false).loss(test_sys.weights());

    if (!exact) {
        m.l2_error = m.linf_error = std::numeric_limits<double>::quiet_NaN();
        return m;
    }
    const auto pts = all_points(test);
    const PdeProblem& prob = train.problem();
    const auto e = error_norms([&](const Point& x) { return solution_value(net, prob, x); }, exact,
                               pts, test.domain.volume() / static_cast<double>(pts.size()));
    m.l2_error = e.l2;
    m.linf_error = e.linf;
    return m;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kOracleNoise = 100.0 * std::numeric_limits<double>::epsilon();

// Coordinate j of the (c, omega) layout.
double& coordinate(RbfNetwork& net, std::size_t j) {
    const std::size_t N = net.size();
    if (j < N) return net.nodes[j].c;
    const std::size_t n = (j - N) / (net.dim + 1);
    const std::size_t i = (j - N) % (net.dim + 1);
    auto& node = net.nodes[n];
    return i < static_cast<std::size_t>(net.dim) ? node.y[static_cast<Eigen::Index>(i)] : node.s_var;
}

}  // namespace

OracleResult fd_jacobian_oracle(const RbfNetwork& net, const ResidualSystem& sys,
                                const AssemblyOptions& options, double step) {
    OracleResult out;
    if (net.size() == 0) return out;
    const auto state = evaluate_residual(net, sys, true);
    const MatrixX J = assemble_jacobian(net, sys, state, options);
    const double scale = J.cwiseAbs().maxCoeff();
    // rounding level of the differenced residuals; smaller errors are not resolvable
    const double noise = kOracleNoise * std::max(1.0, state.R.cwiseAbs().maxCoeff()) / step;

    RbfNetwork work = net;
    for (std::size_t j = 0; j < net.num_variables(); ++j) {
        double& v = coordinate(work, j);
        const double v0 = v;
        auto central = [&](double h) {
            v = v0 + h;
            const VectorX rp = evaluate_residual(work, sys, false).R;
            v = v0 - h;
            const VectorX rm = evaluate_residual(work, sys, false).R;
            v = v0;
            return VectorX((rp - rm) / (2.0 * h));
        };
        // Richardson extrapolation cancels the h^2 term
        const VectorX fd = (4.0 * central(0.5 * step) - central(step)) / 3.0;
        const auto col = J.col(static_cast<Eigen::Index>(j));
        const double denom = std::max({fd.cwiseAbs().maxCoeff(), col.cwiseAbs().maxCoeff(),
                                       1e-8 * scale, std::numeric_limits<double>::min()});
        const double dev = std::max(0.0, (fd - col).cwiseAbs().maxCoeff() - noise) / denom;
        if (dev > out.deviation) {
            out.deviation = dev;
            out.worst = j;
        }
    }
    return out;
}

OracleResult fd_dual_oracle(const RbfNetwork& net, const ResidualSystem& sys,
                            const FeatureParams& omega, double tau) {
    OracleResult out;
    if (net.s_exp != omega.s_exp || net.sigma_bounds.min != omega.sigma_bounds.min ||
        net.sigma_bounds.max != omega.sigma_bounds.max)
        throw UsageError("fd_dual_oracle: candidate feature family differs from the network");
    const double p = dual_variable(net, sys, omega);
    RbfNetwork work = net;
    KernelNode probe;
    probe.y = omega.y;
    probe.s_var = omega.s_var;
    work.nodes.push_back(probe);

    const VectorX& w = sys.weights();
    const double noise = kOracleNoise * std::max(1.0, evaluate_residual(net, sys, false).loss(w)) / tau;
    auto central = [&](double h) {
        work.nodes.back().c = h;
        const double lp = evaluate_residual(work, sys, false).loss(w);
        work.nodes.back().c = -h;
        const double lm = evaluate_residual(work, sys, false).loss(w);
        return (lp - lm) / (2.0 * h);
    };
    const double fd = (4.0 * central(0.5 * tau) - central(tau)) / 3.0;
    const double denom = std::max(std::abs(p), std::abs(fd));
    out.deviation = denom > 0.0 ? std::max(0.0, std::abs(p - fd) - noise) / denom : 0.0;
    return out;
}

OptimalityReport optimality_report(const RbfNetwork& net, const ResidualSystem& sys, double alpha,
                                   std::size_t n_probe, std::uint64_t seed) {
    OptimalityReport rep;
    const auto state = evaluate_residual(net, sys, true);
    const DualField field(sys, state, net.s_exp);
    for (std::size_t n = 0; n < net.size(); ++n) {
        const double p = field(net.nodes[n].y, net.sigma(n));
        rep.max_active_gap = std::max(rep.max_active_gap, std::abs(std::abs(p) - alpha));
        const double c = net.nodes[n].c;
        if (c != 0.0 && !((p > 0.0 && c < 0.0) || (p < 0.0 && c > 0.0))) ++rep.sign_violations;
    }
    if (n_probe > 0) {
        std::mt19937_64 rng(seed);
        const auto best =
            best_candidate(field, sys.points().candidate_box, net.sigma_bounds, n_probe, rng);
        rep.max_candidate_dual = std::abs(best.p);
    }
    return rep;
}

// ---------------------------------------------------------------------------

std::string metrics_csv_header() {
    return "config_hash,seed,problem,k1,k2,alpha,lambda,l2_error,linf_error,loss_train,loss_test,"
           "n_kernels,wall_time_s";
}

std::string metrics_csv_line(const MetricsRow& r) {
    std::ostringstream out;
    out << r.config_hash << ',' << r.seed << ',' << r.problem << ',' << r.k1 << ',' << r.k2 << ','
        << format_double(r.alpha) << ',' << format_double(r.lambda) << ','
        << format_double(r.metrics.l2_error) << ',' << format_double(r.metrics.linf_error) << ','
        << format_double(r.metrics.loss_train) << ',' << format_double(r.metrics.loss_test) << ','
        << r.metrics.n_kernels << ',' << format_double(r.wall_time);
    return out.str();
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
    std::string text = metrics_csv_header() + "\n";
    for (const auto& r : rows) text += metrics_csv_line(r) + "\n";
    write_file_atomic(path, text);
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace srbf
