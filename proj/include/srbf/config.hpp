#pragma once

// Run configuration read from an INI-style file:
//
//   [problem]      name, boundary_mode (l2 | h1 | mask), eikonal_eps,
//                  reference_intervals
//   [collocation]  kind (grid | random), n_per_dim, k1, k2, seed, lambda
//   [solver]       alpha, alpha_ladder, m_candidates, eta, metropolis_T0,
//                  linesearch_h, lm_eps, stop_eps, max_outer, sigma_min,
//                  sigma_max, s_exp
//   [test]         n_per_dim
//   [burgers]      dt, nu, scaled, t_end, slices, test_nt, test_nx, abort_on_nonconvergence
//   [sweep]        alpha, lambda, n_per_dim (comma-separated lists)
//   [run]          seed, out
//
// Lists are comma-separated. Unknown keys are rejected so typos fail loudly.

#include "srbf/diagnostics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace srbf {

struct CollocationSpec {
    std::string kind = "grid";
    int n_per_dim = 20;
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    std::uint64_t seed = 0;
    double lambda = 1.0;
};

struct MarchSpec {
    double t_end = 1.0;
    std::vector<double> slices{0.15, 0.50, 0.85};
    int test_nt = 120;
    int test_nx = 120;
    bool abort_on_nonconvergence = true;
};

struct SweepSpec {
    std::vector<double> alphas;
    std::vector<double> lambdas;
    std::vector<int> n_per_dim;
};

struct RunConfig {
    std::string name;
    std::string problem;
    ProblemOptions problem_options;
    int reference_intervals = 2000;
    CollocationSpec collocation;
    SolverConfig solver;
    int test_n_per_dim = 0;  // 0 picks the per-dimension default
    MarchSpec march;
    SweepSpec sweep;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    std::string canonical;  // sorted key=value text, hashed into metrics rows

    /// Throws UsageError / UnsupportedConfiguration before any compute.
    void validate() const;
    std::string hash() const { return fnv1a_hex(canonical); }
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::string& name = "run");

/// Applies command-line overrides and recomputes the canonical text.
void override_seed(RunConfig& cfg, std::uint64_t seed);

PdeProblem build_problem(const RunConfig& cfg);
CollocationSet build_collocation(const RunConfig& cfg, const Box& domain);
CollocationSet build_test_grid(const RunConfig& cfg, const Box& domain);

/// Exact solution or reference for the configured problem; empty when none exists.
ScalarField build_reference(const RunConfig& cfg, const PdeProblem& prob);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace srbf
