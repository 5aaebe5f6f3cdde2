#pragma once

#include "srbf/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace srbf {

using ScalarField = std::function<double(const Point&)>;

struct Metrics {
    double l2_error = 0.0;   // NaN when no reference is available
    double linf_error = 0.0;
    double loss_train = 0.0;
    double loss_test = 0.0;
    std::size_t n_kernels = 0;
};

struct ErrorNorms {
    double l2 = 0.0;
    double linf = 0.0;
};

/// Discrete norms with one uniform quadrature weight per point:
/// l2 = sqrt(sum_t weight * e_t^2), linf = max_t |e_t|.
ErrorNorms error_norms(const ScalarField& approx, const ScalarField& exact,
                       const std::vector<Point>& pts, double weight);

/// Interior and boundary points of a set, in that order.
std::vector<Point> all_points(const CollocationSet& pts);

/// Test-grid points per axis used for each dimension: 200 (1D), 100 (2D), 20 (4D).
int default_test_points(int dim);

/// Errors against `exact` on every node of `test` with weight |D| / T; the test
/// loss is the empirical loss on `test` with its own weights and the training lambda.
Metrics error_metrics(const RbfNetwork& net, const ResidualSystem& train,
                      const CollocationSet& test, const ScalarField& exact);

// ---------------------------------------------------------------------------
// Finite-difference oracles

struct OracleResult {
    double deviation = 0.0;   // max relative deviation
    std::size_t worst = 0;    // column (Jacobian) or unused
};

/// Central differences of R in every coordinate (c, y, s_var), compared column
/// by column against the assembled Jacobian. Both oracles subtract their own
/// rounding level (100 eps |R|_inf / step, resp. 100 eps L / tau) from the error
/// before dividing by the magnitude.
OracleResult fd_jacobian_oracle(const RbfNetwork& net, const ResidualSystem& sys,
                                const AssemblyOptions& options = {}, double step = 1e-3);

/// Dual variable against a Richardson-extrapolated central difference of L(u + tau phi).
OracleResult fd_dual_oracle(const RbfNetwork& net, const ResidualSystem& sys,
                            const FeatureParams& omega, double tau = 1e-3);

struct OptimalityReport {
    double max_active_gap = 0.0;        // max_n ||p(omega_n)| - alpha|
    std::size_t sign_violations = 0;    // nodes with sign(p) != -sign(c)
    double max_candidate_dual = 0.0;    // max |p| over the probes
};

OptimalityReport optimality_report(const RbfNetwork& net, const ResidualSystem& sys, double alpha,
                                   std::size_t n_probe, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Output

struct MetricsRow {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string problem;
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    double alpha = 0.0;
    double lambda = 0.0;
    Metrics metrics;
    double wall_time = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace srbf
