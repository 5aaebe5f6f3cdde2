#pragma once

// PDE residuals in the form  E[u](x) = r(x, l(x)),  l = L u  a vector of
// linear differential operators applied to u. Problems are assembled from
// closures so the optimizer only ever sees the generic PdeProblem surface.

#include "srbf/collocation.hpp"
#include "srbf/kernel.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace srbf {

inline constexpr int kMaxOperators = kMaxDim + 2;

enum class BoundaryMode { L2Penalty, H1Penalty, Mask };

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(const std::string& text);

/// r(x, l) with d r / d l written into grad (same length as l).
using ResidualFn =
    std::function<double(const Point& x, std::span<const double> l, std::span<double> grad)>;
using JetFn = std::function<Jet(const Point& x)>;

struct OperatorBlock {
    std::vector<JetFunctional> ops;
    ResidualFn residual;
};

struct PdeProblem {
    std::string name;
    int dim = 0;
    Box domain;
    OperatorBlock interior;
    OperatorBlock boundary;
    JetFn boundary_data;  // f_B, gradient used by tangential rows
    JetFn exact;          // empty when no closed form is known
    BoundaryMode boundary_mode = BoundaryMode::L2Penalty;
    std::vector<BoundaryMode> supported_modes;
    JetFn mask_gamma;  // vanishes on the boundary
    JetFn mask_fbar;   // extension of the boundary data; zero when empty

    bool supports(BoundaryMode mode) const;
    /// Throws UnsupportedConfiguration when boundary_mode is not available.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Residual functions

/// -lap + u^3 - f_E with l = (u, lap).
double semilinear_residual(double source, std::span<const double> l, std::span<double> grad);

/// |grad u|^2 - eps * lap - f^2 with l = (grad u, lap).
double eikonal_residual(double eps, double f, std::span<const double> l, std::span<double> grad);

struct BurgersStep {
    double dt = 0.01;
    double nu = 0.02;
    bool scaled = true;
};

/// (u - u_prev)/dt + u u_x - nu u_xx with l = (u, u_x, u_xx); multiplied by dt when scaled.
double burgers_step_residual(const BurgersStep& step, double u_prev, std::span<const double> l,
                             std::span<double> grad);

// ---------------------------------------------------------------------------
// Mask transform u = fbar + gamma * v

Jet mask_transform(const Jet& raw, const Jet& gamma, const Jet& fbar);

/// Pulls a functional on the jet of u back to the jet of v.
JetFunctional mask_adjoint(const JetFunctional& on_u, const Jet& gamma);

// ---------------------------------------------------------------------------
// Exact solutions used for manufactured tests

Jet tanh_profile_1d(const Point& x);
Jet two_bump_2d(const Point& x);
Jet sine_product(const Point& x);
Jet sines_2d(const Point& x);

/// Box mask prod_i (1 - x_i^2) on [-1, 1]^d.
Jet box_mask(const Point& x);

// ---------------------------------------------------------------------------
// Problem factories

struct ProblemOptions {
    BoundaryMode boundary_mode = BoundaryMode::L2Penalty;
    double eikonal_eps = 0.1;
    BurgersStep burgers;
    std::function<double(double)> burgers_previous;  // u^{n-1}(x)
};

/// Semilinear Poisson -lap u + u^3 = f_E, u = f_B with sources from a known solution.
PdeProblem make_semilinear(std::string name, int dim, JetFn exact, BoundaryMode mode);

/// Regularized Eikonal with f = 1 and homogeneous Dirichlet data on [-1, 1]^2.
PdeProblem make_eikonal(double eps, BoundaryMode mode);

/// One implicit Euler step of viscous Burgers on [-1, 1] with u(+-1) = 0.
PdeProblem make_burgers_step(const BurgersStep& step, std::function<double(double)> previous,
                             BoundaryMode mode);

/// Names: semilinear1d, semilinear2d_twobump, semilinear4d, sines2d, eikonal, burgers.
PdeProblem make_problem(const std::string& name, const ProblemOptions& options);

const std::vector<std::string>& problem_names();

// ---------------------------------------------------------------------------
// Boundary rows and the discretized residual system

/// Boundary rows of the chosen treatment: one value row per boundary point,
/// plus one tangential row per non-corner point in H1 mode, none for masks.
std::vector<ResidualRow> boundary_rows(const CollocationSet& pts, BoundaryMode mode);

/// Interior rows followed by boundary_rows.
std::vector<ResidualRow> residual_rows(const CollocationSet& pts, BoundaryMode mode);

/// A problem bound to its collocation points: rows, weights and the per-row
/// data (mask jets, tangential targets) that stay fixed during optimization.
class ResidualSystem {
public:
    ResidualSystem(CollocationSet pts, PdeProblem prob);

    const PdeProblem& problem() const { return prob_; }
    const CollocationSet& points() const { return pts_; }
    std::span<const ResidualRow> rows() const { return rows_; }
    const VectorX& weights() const { return weights_.diag; }
    std::size_t size() const { return rows_.size(); }
    int dim() const { return prob_.dim; }

    const Point& point(std::size_t row) const { return points_[row]; }
    bool masked() const { return prob_.boundary_mode == BoundaryMode::Mask; }
    const Jet& gamma(std::size_t row) const { return gamma_[row]; }
    const Jet& fbar(std::size_t row) const { return fbar_[row]; }

    /// Linear operators of a row.
    std::span<const JetFunctional> ops(std::size_t row) const;

    /// r_k(l) and its gradient in l.
    double residual(std::size_t row, std::span<const double> l, std::span<double> grad) const;

    /// Jet of the represented solution given the raw network jet at a row point.
    Jet solution_jet(std::size_t row, const Jet& raw) const;

    /// Functional on the raw network jet equivalent to `on_u` on the solution jet.
    JetFunctional pull_back(std::size_t row, const JetFunctional& on_u) const;

private:
    CollocationSet pts_;
    PdeProblem prob_;
    std::vector<ResidualRow> rows_;
    WeightMatrix weights_;
    std::vector<Point> points_;
    std::vector<Jet> gamma_;
    std::vector<Jet> fbar_;
    std::vector<std::vector<JetFunctional>> tangent_ops_;
    std::vector<double> tangent_target_;
};

}  // namespace srbf
