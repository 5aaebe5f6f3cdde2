#pragma once

#include "srbf/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srbf {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // a check failed or an unexpected error occurred
    kExitUsage = 2,
    kExitUnsupported = 3,
    kExitSolverFault = 4,
};

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

/// Loads the config and applies --out/--seed overrides.
RunConfig resolve_config(const CommandOptions& opts);

struct SolveOutcome {
    SolveResult result;
    Metrics metrics;
    MetricsRow row;
};

/// Runs one configured solve and writes solution.csv, trace.csv, metrics.csv and
/// test_grid.csv into out_dir.
SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       std::ostream& log);

struct MarchOutcome {
    MarchResult result;
    ErrorNorms errors;  // space-time, NaN when t_end = 0
    double mean_kernels = 0.0;
};

/// Space-time error of a march on an nt x nx grid over [0, t_end] x [-1, 1].
ErrorNorms march_errors(const MarchResult& res, double nu, double t_end, int nt, int nx);

MarchOutcome run_march(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       std::ostream& log);

int cmd_solve(const CommandOptions& opts);
int cmd_march(const CommandOptions& opts);
int cmd_sweep(const CommandOptions& opts);

struct CheckResult {
    std::string name;
    bool pass = false;
    double deviation = 0.0;
    double tolerance = 0.0;
};

enum class Injection { None, HessianSign };

/// The oracle suite: derivative oracles on every problem, prox laws,
/// manufactured-solution residuals and quadrature weight sums.
std::vector<CheckResult> run_checks(Injection inject = Injection::None);

int cmd_check(Injection inject, std::ostream& out);

}  // namespace srbf
