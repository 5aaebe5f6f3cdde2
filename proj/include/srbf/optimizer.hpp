#pragma once

// Three-phase adaptive solver for
//
//   min_{N, c, omega}  0.5 R(c, omega)^T W R(c, omega) + alpha * |c|_1
//
// Phase I inserts the sampled feature with the largest dual |p(omega)|,
// Phase II takes one semismooth Gauss-Newton step on the normal map
// G(q, omega) = (q - prox(q), 0) + grad l(prox(q), omega), and Phase III
// drops nodes whose weight c = prox(q) vanished.

#include "srbf/network.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace srbf {

struct SolverConfig {
    double alpha = 1e-3;
    std::vector<double> alpha_ladder;  // continuation; alpha is ignored when set
    std::size_t m_candidates = 10000;
    double eta = 0.01;
    double metropolis_T0 = 0.0;  // 0 disables the randomized insertion test
    double linesearch_h = 0.2;
    double lm_eps = 1e-3;
    double stop_eps = 1e-5;
    std::size_t max_outer = 2000;
    std::uint64_t seed = 0;
    SigmaBounds sigma_bounds;
    double s_exp = 0.0;  // <= 0 selects d + 2.01

    /// Throws UsageError on out-of-range values.
    void validate() const;
};

struct IterTrace {
    std::size_t iter = 0;
    double loss = 0.0;
    double reg_objective = 0.0;
    std::size_t n_nodes = 0;
    double max_dual_active = 0.0;
    double max_dual_candidate = 0.0;
    bool accepted_insertion = false;
    double step_size = 0.0;  // 0 when Phase II rejected every step length
    double estimated_descent = 0.0;
    double alpha = 0.0;
};

// ---------------------------------------------------------------------------
// Proximal map of alpha |.|_1

inline double prox(double q, double alpha) {
    const double m = std::abs(q) - alpha;
    return m > 0.0 ? (q > 0.0 ? m : -m) : 0.0;
}

/// Semismooth derivative with the convention DProx(+-alpha) = 1.
inline double dprox(double q, double alpha) { return std::abs(q) >= alpha ? 1.0 : 0.0; }

/// Re-derives c = prox(q) for every node.
void sync_weights(RbfNetwork& net, double alpha);

// ---------------------------------------------------------------------------
// Dual variable p[u](omega) = sum_k w_k r_k grad_l r_k^T l_k[phi(.; omega)]

class DualField {
public:
    DualField(const ResidualSystem& sys, const ResidualState& state, double s_exp);

    double operator()(const Vec& y, double sigma) const;

    struct Gradient {
        double p = 0.0;
        Vec d_y;
        double d_sigma = 0.0;
    };
    Gradient with_gradient(const Vec& y, double sigma) const;

    /// True when every residual is zero (p vanishes identically).
    bool trivial() const { return rows_ == 0; }

private:
    int dim_;
    double s_exp_;
    std::size_t rows_ = 0;
    std::vector<double> x_, a_, g_, h_, tr_;
    std::vector<Point> points_;
    std::vector<JetFunctional> weighted_;
};

/// Dual of a single candidate at the current network state.
double dual_variable(const RbfNetwork& net, const ResidualSystem& sys, const FeatureParams& omega);

struct Candidate {
    Vec y;
    double sigma = 0.0;
    double p = 0.0;
};

/// Draws m candidates uniformly (centers in the box, sigma in the open bandwidth
/// interval) and returns the one with the largest |p|.
Candidate best_candidate(const DualField& field, const Box& box, SigmaBounds bounds,
                         std::size_t m, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Phase I

/// min(1, exp(-(threshold - p_hat) / (threshold * temperature * annealing))).
/// The gap is taken relative to the threshold so the temperature is unitless.
double metropolis_probability(double threshold, double p_hat, double temperature,
                              double annealing);

/// sqrt(loss / initial loss) clamped to [1e-6, 1].
double annealing_factor(double loss, double initial_loss);

struct InsertionOutcome {
    bool inserted = false;
    double p_hat = 0.0;      // |p| of the nominee
    double threshold = 0.0;  // max_n |p(omega_n)| + eta |grad_{y_n} L|
    double max_dual_active = 0.0;
};

InsertionOutcome phase1_insert(RbfNetwork& net, const ResidualSystem& sys,
                               const ResidualState& state, const SolverConfig& cfg,
                               double annealing, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Phase II

struct NormalMap {
    VectorX G;
    MatrixX DG;
    VectorX dp;  // diagonal of DP
};

/// G and its generalized derivative with the Gauss-Newton Hessian J^T W J + damping * Cor.
NormalMap normal_map(const RbfNetwork& net, const ResidualSystem& sys, const ResidualState& state,
                     const MatrixX& J, double alpha, double lm_eps, double damping = 1.0);

/// 0.5 R^T W R + alpha |c|_1
double regularized_objective(const RbfNetwork& net, const ResidualState& state,
                             const VectorX& w, double alpha);

struct StepOutcome {
    bool accepted = false;
    double theta = 0.0;
    double predicted = 0.0;  // G^T (DP z) at theta = 1
    double objective_before = 0.0;
    double objective_after = 0.0;
    double damping = 1.0;  // Cor multiplier of the accepted direction
    ResidualState state;  // state of the network after the step
};

inline constexpr double kStepShrink = 2.0 / 3.0;
inline constexpr int kMaxStepShrinks = 30;
// When no step length passes the trust test, Cor is scaled by 10 and the
// direction recomputed, at most this many times.
inline constexpr int kMaxDampingRetries = 6;

StepOutcome gauss_newton_step(RbfNetwork& net, const ResidualSystem& sys,
                              const ResidualState& state, const SolverConfig& cfg, double alpha);

// ---------------------------------------------------------------------------
// Phase III and stopping

/// Removes nodes with c == 0, keeping survivor order.
void phase3_prune(RbfNetwork& net);

bool stopping_check(double estimated_descent, double best_candidate_dual, double alpha,
                    double stop_eps);

// ---------------------------------------------------------------------------
// Drivers

struct SolveResult {
    RbfNetwork net;
    std::vector<IterTrace> trace;
    bool converged = false;
};

using IterationCallback = std::function<void(const IterTrace&)>;

/// Algorithm loop at a single alpha (cfg.alpha), warm-started from net0.
SolveResult solve(RbfNetwork net0, const ResidualSystem& sys, const SolverConfig& cfg,
                  const IterationCallback& on_iter = {});

/// Solves along cfg.alpha_ladder (or just cfg.alpha), each stage warm-started
/// from the previous one with q kept and c re-derived.
SolveResult continuation_solve(const ResidualSystem& sys, const SolverConfig& cfg,
                               std::optional<RbfNetwork> init = std::nullopt,
                               const IterationCallback& on_iter = {});

struct MarchConfig {
    BurgersStep step;
    double t_end = 1.0;
    BoundaryMode boundary_mode = BoundaryMode::Mask;
    bool abort_on_nonconvergence = true;
};

struct MarchResult {
    std::vector<double> times;          // t_0 = 0, t_1, ...
    std::vector<RbfNetwork> networks;   // networks[n] represents u^n for n >= 1
    std::vector<std::size_t> iterations;
    std::vector<IterTrace> trace;       // all steps concatenated
    bool completed = true;
    std::string failure;

    /// u^n(x) including the mask; n = 0 returns the initial condition.
    double value(std::size_t n, double x) const;
    /// Piecewise linear interpolation in time between stored steps.
    double interpolate(double t, double x) const;

    BoundaryMode boundary_mode = BoundaryMode::Mask;
    BurgersStep step;
};

double burgers_initial_condition(double x);

/// Implicit Euler march for viscous Burgers with u^0 = -sin(pi x). With the
/// scaled residual, alpha (not the stopping tolerance) is multiplied by dt^2.
MarchResult time_march(const CollocationSet& pts, const SolverConfig& cfg,
                       const MarchConfig& march);

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterTrace>& trace);

}  // namespace srbf
