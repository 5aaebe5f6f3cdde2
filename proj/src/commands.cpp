#include "srbf/commands.hpp"

#include "srbf/io.hpp"
#include "srbf/reference.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace srbf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedConfiguration& e) {
        std::cerr << "unsupported configuration: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const SolverFault& e) {
        std::cerr << "solver fault: " << e.what() << "\n";
        return kExitSolverFault;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

std::filesystem::path output_dir(const RunConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    return std::filesystem::path("results") / cfg.name;
}

void write_test_grid(const std::filesystem::path& path, const RbfNetwork& net,
                     const PdeProblem& prob, const CollocationSet& test, const ScalarField& ref) {
    std::ostringstream out;
    for (int i = 1; i <= prob.dim; ++i) out << "x_" << i << ',';
    out << "u_exact,u_num,error\n";
    for (const auto& x : all_points(test)) {
        const double u = solution_value(net, prob, x);
        const double e = ref ? ref(x) : kNaN;
        for (int i = 0; i < prob.dim; ++i) out << format_double(x[i]) << ',';
        out << format_double(e) << ',' << format_double(u) << ',' << format_double(u - e) << '\n';
    }
    write_file_atomic(path, out.str());
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
    if (opts.threads < 1) throw UsageError("--threads must be at least 1");
    Eigen::setNbThreads(opts.threads);
    RunConfig cfg = load_run_config(opts.config);
    if (opts.seed) override_seed(cfg, *opts.seed);
    if (opts.out) cfg.out_dir = *opts.out;
    cfg.validate();
    return cfg;
}

SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       std::ostream& log) {
    const PdeProblem prob = build_problem(cfg);
    const CollocationSet pts = build_collocation(cfg, prob.domain);
    const ResidualSystem sys(pts, prob);

    std::vector<IterTrace> trace;
    const auto t0 = std::chrono::steady_clock::now();
    SolveOutcome out;
    try {
        out.result = continuation_solve(sys, cfg.solver, std::nullopt,
                                        [&](const IterTrace& t) { trace.push_back(t); });
    } catch (const SolverFault&) {
        write_trace_csv(out_dir / "trace.csv", trace);
        throw;
    }
    const double wall = seconds_since(t0);

    const CollocationSet test = build_test_grid(cfg, prob.domain);
    const ScalarField ref = build_reference(cfg, prob);
    out.metrics = error_metrics(out.result.net, sys, test, ref);

    out.row.config_hash = cfg.hash();
    out.row.seed = cfg.seed;
    out.row.problem = cfg.problem;
    out.row.k1 = pts.k1();
    out.row.k2 = pts.k2();
    out.row.alpha = cfg.solver.alpha_ladder.empty() ? cfg.solver.alpha : cfg.solver.alpha_ladder.back();
    out.row.lambda = pts.lambda;
    out.row.metrics = out.metrics;
    out.row.wall_time = wall;

    write_solution_dump(out_dir / "solution.csv", out.result.net);
    write_trace_csv(out_dir / "trace.csv", out.result.trace);
    write_metrics_csv(out_dir / "metrics.csv", {out.row});
    write_test_grid(out_dir / "test_grid.csv", out.result.net, prob, test, ref);

    log << cfg.name << ": " << (out.result.converged ? "converged" : "stopped at max_outer")
        << " after " << out.result.trace.size() << " iterations, " << out.metrics.n_kernels
        << " kernels, L2 " << out.metrics.l2_error << ", Linf " << out.metrics.linf_error
        << ", loss train " << out.metrics.loss_train << ", test " << out.metrics.loss_test << " ("
        << std::fixed << std::setprecision(1) << wall << std::defaultfloat << " s)\n";
    return out;
}

ErrorNorms march_errors(const MarchResult& res, double nu, double t_end, int nt, int nx) {
    if (!(t_end > 0.0)) return ErrorNorms{kNaN, kNaN};
    const BurgersExact exact(nu);
    ErrorNorms e;
    double sum = 0.0;
    const double w = 2.0 * t_end / (static_cast<double>(nt) * nx);
    for (int i = 0; i < nt; ++i) {
        const double t = t_end * i / (nt - 1);
        for (int j = 0; j < nx; ++j) {
            const double x = -1.0 + 2.0 * j / (nx - 1);
            const double d = res.interpolate(t, x) - exact(t, x);
            sum += w * d * d;
            e.linf = std::max(e.linf, std::abs(d));
        }
    }
    e.l2 = std::sqrt(sum);
    return e;
}

MarchOutcome run_march(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       std::ostream& log) {
    if (cfg.problem != "burgers") throw UsageError("march requires problem.name = burgers");
    const PdeProblem prob = build_problem(cfg);
    const CollocationSet pts = build_collocation(cfg, prob.domain);

    MarchConfig mc;
    mc.step = cfg.problem_options.burgers;
    mc.t_end = cfg.march.t_end;
    mc.boundary_mode = cfg.problem_options.boundary_mode;
    mc.abort_on_nonconvergence = cfg.march.abort_on_nonconvergence;

    const auto t0 = std::chrono::steady_clock::now();
    MarchOutcome out;
    out.result = time_march(pts, cfg.solver, mc);
    const double wall = seconds_since(t0);
    const MarchResult& res = out.result;
    const double reached = res.times.back();
    const double nu = mc.step.nu;
    const BurgersExact exact(nu);
    constexpr int kSlicePoints = 201;
    auto slice = [&](double t) {
        std::ostringstream s;
        s << "x,u_exact,u_num\n";
        for (int j = 0; j < kSlicePoints; ++j) {
            const double x = -1.0 + 2.0 * j / (kSlicePoints - 1);
            s << format_double(x) << ',' << format_double(exact(t, x)) << ','
              << format_double(res.interpolate(t, x)) << '\n';
        }
        return s.str();
    };
    write_file_atomic(out_dir / "initial.csv", slice(0.0));
    if (res.networks.empty() && res.completed) {
        out.errors = ErrorNorms{kNaN, kNaN};
        log << cfg.name << ": t_end = 0, wrote the initial condition only\n";
        return out;
    }

    std::ostringstream kern;
    kern << "step,t,n_kernels,iterations\n";
    double total = 0.0;
    for (std::size_t n = 0; n < res.networks.size(); ++n) {
        kern << n + 1 << ',' << format_double(res.times[n + 1]) << ',' << res.networks[n].size()
             << ',' << res.iterations[n] << '\n';
        total += static_cast<double>(res.networks[n].size());
    }
    out.mean_kernels = res.networks.empty() ? 0.0 : total / static_cast<double>(res.networks.size());
    write_file_atomic(out_dir / "kernels.csv", kern.str());
    write_trace_csv(out_dir / "trace.csv", res.trace);

    for (double t : cfg.march.slices) {
        if (t > reached + 1e-12) continue;
        std::ostringstream name;
        name << "slice_t" << std::fixed << std::setprecision(2) << t << ".csv";
        write_file_atomic(out_dir / name.str(), slice(t));
    }

    out.errors = march_errors(res, nu, reached, cfg.march.test_nt, cfg.march.test_nx);
    MetricsRow row;
    row.config_hash = cfg.hash();
    row.seed = cfg.seed;
    row.problem = cfg.problem;
    row.k1 = pts.k1();
    row.k2 = pts.k2();
    row.alpha = cfg.solver.alpha_ladder.empty() ? cfg.solver.alpha : cfg.solver.alpha_ladder.back();
    row.lambda = pts.lambda;
    row.metrics.l2_error = out.errors.l2;
    row.metrics.linf_error = out.errors.linf;
    row.metrics.loss_train = kNaN;
    row.metrics.loss_test = kNaN;
    row.metrics.n_kernels = static_cast<std::size_t>(std::lround(out.mean_kernels));
    row.wall_time = wall;
    write_metrics_csv(out_dir / "metrics.csv", {row});

    log << cfg.name << ": " << res.networks.size() << " steps to t = " << reached
        << ", mean kernels " << out.mean_kernels << ", space-time L2 " << out.errors.l2
        << ", Linf " << out.errors.linf << " (" << std::fixed << std::setprecision(1) << wall
        << std::defaultfloat << " s)\n";
    if (!res.completed) log << cfg.name << ": aborted: " << res.failure << "\n";
    return out;
}

int cmd_solve(const CommandOptions& opts) {
    return guarded([&] {
        const RunConfig cfg = resolve_config(opts);
        run_solve(cfg, output_dir(cfg), std::cout);
        return static_cast<int>(kExitOk);
    });
}

int cmd_march(const CommandOptions& opts) {
    return guarded([&] {
        const RunConfig cfg = resolve_config(opts);
        const auto out = run_march(cfg, output_dir(cfg), std::cout);
        return static_cast<int>(out.result.completed ? kExitOk : kExitSolverFault);
    });
}

int cmd_sweep(const CommandOptions& opts) {
    return guarded([&] {
        const RunConfig base = resolve_config(opts);
        const auto root = output_dir(base);
        const auto& sw = base.sweep;
        const std::vector<double> alphas =
            sw.alphas.empty() ? std::vector<double>{std::nan("")} : sw.alphas;
        const std::vector<double> lambdas =
            sw.lambdas.empty() ? std::vector<double>{base.collocation.lambda} : sw.lambdas;
        const std::vector<int> ns =
            sw.n_per_dim.empty() ? std::vector<int>{base.collocation.n_per_dim} : sw.n_per_dim;

        std::vector<MetricsRow> rows;
        for (int n : ns) {
            for (double lam : lambdas) {
                for (double a : alphas) {
                    RunConfig cfg = base;
                    std::ostringstream tag;
                    tag << "n" << n << "_lambda" << format_double(lam);
                    cfg.collocation.n_per_dim = n;
                    cfg.collocation.lambda = lam;
                    if (!std::isnan(a)) {
                        cfg.solver.alpha = a;
                        cfg.solver.alpha_ladder.clear();
                        tag << "_alpha" << format_double(a);
                    }
                    cfg.canonical += "sweep.point=" + tag.str() + "\n";
                    cfg.name = base.name + "/" + tag.str();
                    rows.push_back(run_solve(cfg, root / tag.str(), std::cout).row);
                    write_metrics_csv(root / "metrics.csv", rows);
                }
            }
        }
        return static_cast<int>(kExitOk);
    });
}

// ---------------------------------------------------------------------------
// Oracle suite

namespace {

struct Fixture {
    std::string problem;
    BoundaryMode mode;
    int n_grid;
};

const std::vector<Fixture>& fixtures() {
    static const std::vector<Fixture> f{
        {"semilinear1d", BoundaryMode::L2Penalty, 12},
        {"semilinear2d_twobump", BoundaryMode::L2Penalty, 7},
        {"semilinear2d_twobump", BoundaryMode::H1Penalty, 7},
        {"semilinear4d", BoundaryMode::L2Penalty, 4},
        {"semilinear4d", BoundaryMode::Mask, 4},
        {"sines2d", BoundaryMode::Mask, 7},
        {"eikonal", BoundaryMode::Mask, 7},
        {"eikonal", BoundaryMode::L2Penalty, 7},
        {"burgers", BoundaryMode::Mask, 12},
        {"burgers", BoundaryMode::L2Penalty, 12},
    };
    return f;
}

RbfNetwork random_network(int dim, std::size_t nodes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    RbfNetwork net = RbfNetwork::empty(dim);
    for (std::size_t n = 0; n < nodes; ++n) {
        KernelNode k;
        k.y = Vec(dim);
        for (int i = 0; i < dim; ++i) k.y[i] = unit(rng);
        k.s_var = -0.5 + 1.5 * unit(rng);
        k.c = unit(rng);
        k.q = k.c;
        net.nodes.push_back(k);
    }
    return net;
}

CheckResult make_check(std::string name, double deviation, double tolerance) {
    return CheckResult{std::move(name), deviation <= tolerance, deviation, tolerance};
}

}  // namespace

std::vector<CheckResult> run_checks(Injection inject) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(20240611);
    AssemblyOptions opts;
    opts.flip_hessian_sign = inject == Injection::HessianSign;

    for (const auto& fx : fixtures()) {
        ProblemOptions po;
        po.boundary_mode = fx.mode;
        const PdeProblem prob = make_problem(fx.problem, po);
        const ResidualSystem sys(make_grid(fx.n_grid, prob.domain, 10.0), prob);
        const std::string tag = fx.problem + "/" + to_string(fx.mode);

        double jac = 0.0;
        double dual = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const RbfNetwork net = random_network(prob.dim, 3, rng);
            jac = std::max(jac, fd_jacobian_oracle(net, sys, opts).deviation);
            const RbfNetwork probe = random_network(prob.dim, 1, rng);
            dual = std::max(dual, fd_dual_oracle(net, sys, probe.params(0)).deviation);
        }
        out.push_back(make_check("jacobian_fd " + tag, jac, 1e-5));
        out.push_back(make_check("dual_fd " + tag, dual, 1e-5));
    }

    // Residual gradients in l against central differences.
    for (const auto& name : problem_names()) {
        const PdeProblem prob = make_problem(name, ProblemOptions{});
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            Point x(prob.dim);
            for (int i = 0; i < prob.dim; ++i) x[i] = 0.9 * unit(rng);
            const std::size_t m = prob.interior.ops.size();
            std::vector<double> l(m), grad(m), scratch(m);
            for (auto& v : l) v = 2.0 * unit(rng);
            prob.interior.residual(x, l, grad);
            for (std::size_t i = 0; i < m; ++i) {
                const double h = 1e-6;
                auto lp = l;
                auto lm = l;
                lp[i] += h;
                lm[i] -= h;
                const double fd = (prob.interior.residual(x, lp, scratch) -
                                   prob.interior.residual(x, lm, scratch)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])));
            }
        }
        out.push_back(make_check("residual_gradient " + name, worst, 1e-6));
    }

    // Manufactured solutions make the interior residual vanish.
    for (const auto& name : problem_names()) {
        const PdeProblem prob = make_problem(name, ProblemOptions{});
        if (!prob.exact) continue;
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            Point x(prob.dim);
            for (int i = 0; i < prob.dim; ++i) x[i] = unit(rng);
            const Jet u = prob.exact(x);
            const std::size_t m = prob.interior.ops.size();
            std::vector<double> l(m), grad(m);
            for (std::size_t i = 0; i < m; ++i) l[i] = prob.interior.ops[i].apply(u);
            worst = std::max(worst, std::abs(prob.interior.residual(x, l, grad)));
        }
        out.push_back(make_check("manufactured_residual " + name, worst, 1e-10));
    }

    // Soft-threshold identities.
    {
        double worst = std::abs(prox(2.0, 1.0) - 1.0) + std::abs(prox(-0.5, 1.0)) +
                       std::abs(dprox(-0.5, 1.0)) + std::abs(prox(0.3, 0.3)) +
                       std::abs(dprox(0.3, 0.3) - 1.0) + std::abs(dprox(-0.3, 0.3) - 1.0);
        std::uniform_real_distribution<double> unit(-5.0, 5.0);
        for (int trial = 0; trial < 1000; ++trial) {
            const double q = unit(rng);
            const double a = std::abs(unit(rng));
            // Moreau decomposition q = prox(q) + a * clip(q / a, -1, 1)
            const double resid = q - prox(q, a) - a * std::clamp(q / a, -1.0, 1.0);
            worst = std::max(worst, std::abs(resid));
        }
        out.push_back(make_check("prox_laws", worst, 1e-12));
    }

    // Quadrature weights add up to the domain and boundary measures.
    for (int d : {1, 2, 4}) {
        const Box box = Box::cube(d, -1.0, 1.0);
        const auto pts = make_grid(d == 4 ? 6 : 20, box, 1.0);
        double s1 = 0.0;
        double s2 = 0.0;
        for (double w : pts.interior_weights) s1 += w;
        for (double w : pts.boundary_weights) s2 += w;
        const double dev = std::max(std::abs(s1 - box.volume()) / box.volume(),
                                    std::abs(s2 - box.boundary_measure()) / box.boundary_measure());
        out.push_back(make_check("weight_sums d=" + std::to_string(d), dev, 1e-10));
    }
    return out;
}

int cmd_check(Injection inject, std::ostream& out) {
    return guarded([&] {
        const auto results = run_checks(inject);
        std::size_t passed = 0;
        for (const auto& r : results) {
            out << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(44) << r.name
                << " deviation=" << std::scientific << std::setprecision(3) << r.deviation
                << " tol=" << r.tolerance << std::defaultfloat << "\n";
            if (r.pass) ++passed;
        }
        out << passed << "/" << results.size() << " checks passed\n";
        return static_cast<int>(passed == results.size() ? kExitOk : kExitFailure);
    });
}

}  // namespace srbf
