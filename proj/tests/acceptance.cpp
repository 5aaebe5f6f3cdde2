// Acceptance suite. Usage: srbf_acceptance <criterion 1..10 | all> [work dir]
// Prints one PASS/FAIL line per criterion; exit status is nonzero on failure.

#include "srbf/commands.hpp"
#include "srbf/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace srbf;

namespace {

std::filesystem::path g_work = std::filesystem::temp_directory_path() / "srbf_acceptance";
std::ostringstream g_log;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

RunConfig preset(const std::string& name) {
    return load_run_config(std::filesystem::path(SRBF_CONFIG_DIR) / (name + ".ini"));
}

SolveOutcome solve_preset(const RunConfig& cfg, const std::string& tag) {
    auto out = run_solve(cfg, g_work / tag, g_log);
    std::cerr << g_log.str();
    g_log.str("");
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
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

// ---------------------------------------------------------------------------

Verdict derivatives() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2025);
    double jac = 0.0, dual = 0.0;
    std::size_t fixtures = 0;
    for (const auto& name : problem_names()) {
        const PdeProblem base = make_problem(name, ProblemOptions{});
        const auto& modes = base.supported_modes;
        for (int f = 0; f < 20; ++f) {
            ProblemOptions o;
            o.boundary_mode = modes[static_cast<std::size_t>(f) % modes.size()];
            const PdeProblem p = make_problem(name, o);
            const int n = p.dim == 1 ? 12 : p.dim == 2 ? 7 : 4;
            const ResidualSystem sys(make_grid(n, p.domain, 10.0), p);
            const RbfNetwork net = random_network(p.dim, 3, rng);
            const RbfNetwork probe = random_network(p.dim, 1, rng);
            jac = std::max(jac, fd_jacobian_oracle(net, sys).deviation);
            dual = std::max(dual, fd_dual_oracle(net, sys, probe.params(0)).deviation);
            ++fixtures;
        }
    }
    const double wall = seconds_since(t0);
    return {jac <= 1e-5 && dual <= 1e-5 && wall < 10.0,
            std::to_string(fixtures) + " fixtures: jacobian dev " + sci(jac) + ", dual dev " +
                sci(dual) + " (tol 1e-5), " + sci(wall) + " s (< 10 s)"};
}

Verdict optimality() {
    // soft-threshold identities and the DProx convention
    bool laws = prox(1.5, 1.0) == 0.5 && prox(-1.5, 1.0) == -0.5 && prox(0.7, 1.0) == 0.0 &&
                dprox(1.0, 1.0) == 1.0 && dprox(-1.0, 1.0) == 1.0 && dprox(0.99, 1.0) == 0.0;
    for (double q = -3.0; q <= 3.0; q += 0.01)
        laws = laws && std::abs(q - prox(q, 0.5) - 0.5 * std::clamp(q / 0.5, -1.0, 1.0)) < 1e-15;

    RunConfig cfg = preset("intro1d");
    cfg.solver.stop_eps = 1e-9;
    cfg.solver.max_outer = 3000;
    const auto out = solve_preset(cfg, "optimality");
    const double alpha = cfg.solver.alpha_ladder.back();
    const PdeProblem p = build_problem(cfg);
    const ResidualSystem sys(build_collocation(cfg, p.domain), p);
    const auto rep = optimality_report(out.result.net, sys, alpha, 10000, 77);
    const bool ok = laws && rep.max_active_gap <= 1e-3 * alpha && rep.sign_violations == 0 &&
                    rep.max_candidate_dual <= alpha * (1.0 + 1e-2);
    return {ok, std::string("prox laws ") + (laws ? "ok" : "broken") + ", converged " +
                    (out.result.converged ? "yes" : "no") + ", active gap " +
                    sci(rep.max_active_gap) + " (<= " + sci(1e-3 * alpha) + "), sign violations " +
                    std::to_string(rep.sign_violations) + ", max candidate |p| " +
                    sci(rep.max_candidate_dual) + " (<= " + sci(alpha * 1.01) + ")"};
}

/// Largest relative increase of the regularized objective within one alpha stage.
double worst_increase(const std::vector<IterTrace>& trace) {
    double worst = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].alpha != trace[i - 1].alpha || trace[i].iter <= trace[i - 1].iter) continue;
        const double prev = trace[i - 1].reg_objective;
        worst = std::max(worst, (trace[i].reg_objective - prev) / std::max(std::abs(prev), 1e-300));
    }
    return worst;
}

Verdict monotone_descent() {
    // Every preset with a capped budget: a handful of iterations per stage and,
    // for marches, the first five steps.
    std::size_t presets = 0;
    double worst = 0.0;
    std::string worst_name;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(SRBF_CONFIG_DIR))
        if (e.path().extension() == ".ini") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        RunConfig cfg = load_run_config(path);
        cfg.solver.max_outer = std::min<std::size_t>(cfg.solver.max_outer, 8);
        double inc = 0.0;
        if (cfg.problem == "burgers") {
            cfg.march.t_end = 5 * cfg.problem_options.burgers.dt;
            const PdeProblem p = build_problem(cfg);
            MarchConfig mc;
            mc.step = cfg.problem_options.burgers;
            mc.t_end = cfg.march.t_end;
            mc.boundary_mode = cfg.problem_options.boundary_mode;
            mc.abort_on_nonconvergence = false;
            const auto res = time_march(build_collocation(cfg, p.domain), cfg.solver, mc);
            inc = worst_increase(res.trace);
        } else {
            const PdeProblem p = build_problem(cfg);
            const ResidualSystem sys(build_collocation(cfg, p.domain), p);
            inc = worst_increase(continuation_solve(sys, cfg.solver).trace);
        }
        ++presets;
        if (inc > worst || worst_name.empty()) {
            worst = std::max(worst, inc);
            if (inc >= worst) worst_name = path.stem().string();
        }
    }
    return {worst <= 1e-12, std::to_string(presets) + " presets, largest relative increase " +
                                sci(worst) + " (" + worst_name + ", tol 1e-12)"};
}

Verdict two_bump() {
    const auto out = solve_preset(preset("table2_k50_a1em4"), "table2_k50_a1em4");
    const auto& m = out.metrics;
    return {m.l2_error <= 5e-2 && m.linf_error <= 0.2 && m.n_kernels <= 250 && out.row.wall_time <= 600.0,
            "n=50: L2 " + sci(m.l2_error) + " (<= 5e-2), Linf " + sci(m.linf_error) +
                " (<= 0.2), kernels " + std::to_string(m.n_kernels) + " (<= 250), " +
                sci(out.row.wall_time) + " s (<= 600)"};
}

Verdict overfitting() {
    const auto out = solve_preset(preset("table2_k20_a1em4"), "table2_k20_a1em4");
    const double ratio = out.metrics.loss_test / out.metrics.loss_train;
    return {ratio > 10.0, "n=20: loss_test " + sci(out.metrics.loss_test) + " / loss_train " +
                              sci(out.metrics.loss_train) + " = " + sci(ratio) + " (> 10)"};
}

Verdict eikonal() {
    const auto main = solve_preset(preset("table4_k900_a1em6"), "table4_k900_a1em6");
    const bool accurate = main.metrics.l2_error <= 1e-2 && main.metrics.n_kernels <= 150;

    std::vector<double> dist;
    std::string detail;
    for (const char* name : {"eikonal_eps0p5", "eikonal_eps0p1", "eikonal_eps0p05", "eikonal_eps0p01"}) {
        const RunConfig cfg = preset(name);
        const auto out = solve_preset(cfg, name);
        const PdeProblem p = build_problem(cfg);
        const auto test = build_test_grid(cfg, p.domain);
        const auto e = error_norms([&](const Point& x) { return solution_value(out.result.net, p, x); },
                                   eikonal_viscosity_limit, all_points(test), 0.0);
        dist.push_back(e.linf);
        detail += " " + sci(e.linf);
    }
    bool monotone = dist.back() < dist.front();
    for (std::size_t i = 1; i < dist.size(); ++i) monotone = monotone && dist[i] <= 2.0 * dist[i - 1];
    return {accurate && monotone,
            "eps=0.1: L2 " + sci(main.metrics.l2_error) + " (<= 1e-2), kernels " +
                std::to_string(main.metrics.n_kernels) + " (<= 150); Linf to u_visc for eps 0.5..0.01:" +
                detail + " (each <= 2x previous, last < first)"};
}

Verdict burgers() {
    auto run = [](const std::string& name) {
        auto out = run_march(preset(name), g_work / name, g_log);
        std::cerr << g_log.str();
        g_log.str("");
        return out;
    };
    const auto fine = run("table5_dt0p01_a1em4");
    const auto coarse = run("table5_dt0p1_a1em4");
    const bool ok = fine.result.completed && fine.errors.l2 <= 3e-2 && fine.errors.linf <= 0.1 &&
                    coarse.errors.l2 > fine.errors.l2;
    return {ok, "dt=0.01: L2 " + sci(fine.errors.l2) + " (<= 3e-2), Linf " + sci(fine.errors.linf) +
                    " (<= 0.1), mean kernels " + sci(fine.mean_kernels) + "; dt=0.1: L2 " +
                    sci(coarse.errors.l2) + " (> dt=0.01)"};
}

Verdict four_d() {
    const auto big = solve_preset(preset("table3_k4096_a1em4"), "table3_k4096_a1em4");
    const auto small = solve_preset(preset("table3_k1296_a1em4"), "table3_k1296_a1em4");
    return {big.metrics.l2_error <= 0.2 && small.metrics.loss_test > small.metrics.loss_train,
            "K=4096: L2 " + sci(big.metrics.l2_error) + " (<= 0.2); K=1296: loss_test " +
                sci(small.metrics.loss_test) + " > loss_train " + sci(small.metrics.loss_train)};
}

Verdict boundary_ordering() {
    auto l2_of = [](RunConfig cfg, double lambda, std::uint64_t seed, const std::string& tag) {
        cfg.collocation.lambda = lambda;
        cfg.sweep = SweepSpec{};
        override_seed(cfg, seed);
        return solve_preset(cfg, tag + "_s" + std::to_string(seed)).metrics.l2_error;
    };
    const RunConfig l2 = preset("sines_l2_sweep");
    const RunConfig h1 = preset("sines_h1_sweep");
    const RunConfig mask = preset("sines_mask");
    constexpr int kSeeds = 5;
    std::map<std::string, std::vector<double>> runs;
    for (std::uint64_t s = 0; s < kSeeds; ++s) {
        runs["mask"].push_back(l2_of(mask, mask.collocation.lambda, s, "sines_mask"));
        runs["h1_10"].push_back(l2_of(h1, 10.0, s, "sines_h1_10"));
        for (double lam : {10.0, 100.0, 1000.0}) {
            const std::string key = "l2_" + std::to_string(static_cast<int>(lam));
            runs[key].push_back(l2_of(l2, lam, s, "sines_" + key));
        }
    }
    const double m_mask = median(runs["mask"]);
    const double m_h1 = median(runs["h1_10"]);
    const double m_l2_10 = median(runs["l2_10"]);
    const double best_l2 = std::min({m_l2_10, median(runs["l2_100"]), median(runs["l2_1000"])});
    return {m_mask <= best_l2 && m_h1 < m_l2_10,
            "median L2 over 5 seeds: mask " + sci(m_mask) + " <= best L2-penalty " + sci(best_l2) +
                "; H1 lambda=10 " + sci(m_h1) + " < L2 lambda=10 " + sci(m_l2_10)};
}

Verdict collocation() {
    const auto random = solve_preset(preset("table6_k400_a1em4"), "table6_k400_a1em4");
    const auto grid = solve_preset(preset("table2_k20_a1em4"), "table2_k20_a1em4_ref");
    const double ratio = random.metrics.l2_error / grid.metrics.l2_error;
    return {ratio >= 3.0, "K=400: random L2 " + sci(random.metrics.l2_error) + " / grid L2 " +
                              sci(grid.metrics.l2_error) + " = " + sci(ratio) + " (>= 3)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
        {1, {"derivative correctness", derivatives}},
        {2, {"prox and optimality laws", optimality}},
        {3, {"monotone descent on presets", monotone_descent}},
        {4, {"two-bump 2D semilinear", two_bump}},
        {5, {"overfitting signature", overfitting}},
        {6, {"Eikonal and viscosity limit", eikonal}},
        {7, {"Burgers implicit Euler", burgers}},
        {8, {"4D semilinear", four_d}},
        {9, {"boundary-treatment ordering", boundary_ordering}},
        {10, {"collocation sensitivity", collocation}},
    };
    const std::string which = argc > 1 ? argv[1] : "all";
    if (argc > 2) g_work = argv[2];

    int failures = 0;
    for (const auto& [id, c] : criteria) {
        if (which != "all" && which != std::to_string(id)) continue;
        Verdict v;
        try {
            v = c.second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << c.first
                  << "): " << v.detail << std::endl;
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
