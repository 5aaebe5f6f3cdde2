#pragma once

#include "srbf/kernel.hpp"
#include "srbf/problems.hpp"

#include <filesystem>
#include <vector>

namespace srbf {

/// One feature function with its outer weight. c is always prox(q) for the
/// current regularization weight; the optimizer maintains that invariant.
struct KernelNode {
    double c = 0.0;
    double q = 0.0;
    Vec y;
    double s_var = 0.0;
};

struct RbfNetwork {
    int dim = 1;
    double s_exp = 3.01;
    SigmaBounds sigma_bounds;
    std::vector<KernelNode> nodes;

    static RbfNetwork empty(int dim) {
        RbfNetwork net;
        net.dim = dim;
        net.s_exp = default_feature_exponent(dim);
        return net;
    }

    std::size_t size() const { return nodes.size(); }
    double sigma(std::size_t n) const { return sigma_reparam(nodes[n].s_var, sigma_bounds).sigma; }
    FeatureParams params(std::size_t n) const {
        return FeatureParams{nodes[n].y, nodes[n].s_var, sigma_bounds, s_exp};
    }
    /// Number of optimization variables N (d + 2).
    std::size_t num_variables() const { return nodes.size() * (dim + 2); }
};

using SolutionJet = Jet;

/// Raw network jet sum_n c_n (phi, grad phi, hess phi)(x; omega_n).
SolutionJet eval_jet(const RbfNetwork& net, const Point& x);
double eval_value(const RbfNetwork& net, const Point& x);

/// Jet of the represented solution, applying the problem's mask if active.
SolutionJet solution_jet(const RbfNetwork& net, const PdeProblem& prob, const Point& x);
double solution_value(const RbfNetwork& net, const PdeProblem& prob, const Point& x);

using OperatorValues = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxOperators, 1>;

/// l_k[u] for every row of the system.
std::vector<OperatorValues> batch_linear_ops(const RbfNetwork& net, const ResidualSystem& sys);

/// Residual vector plus, per row, the functional on the raw network jet whose
/// application to a perturbation gives the first-order change of r_k.
struct ResidualState {
    VectorX R;
    std::vector<JetFunctional> sensitivity;

    /// 0.5 * R^T W R
    double loss(const VectorX& w) const { return 0.5 * (R.array().square() * w.array()).sum(); }
};

ResidualState evaluate_residual(const RbfNetwork& net, const ResidualSystem& sys,
                                bool with_sensitivity = true);

struct AssemblyOptions {
    /// Fault injection for the oracle self-test: flips the sign of every
    /// second-order term in the Jacobian path only.
    bool flip_hessian_sign = false;
};

/// Jacobian of R with columns [c_1..c_N, (y_1..y_d, s_var) for node 1, ..., node N].
MatrixX assemble_jacobian(const RbfNetwork& net, const ResidualSystem& sys,
                          const ResidualState& state, const AssemblyOptions& options = {});

struct Assembly {
    VectorX R;
    MatrixX J;
};

Assembly assemble_residual_and_jacobian(const RbfNetwork& net, const ResidualSystem& sys,
                                        const AssemblyOptions& options = {});

/// Column offset of node n's (y, s_var) block.
inline std::size_t omega_column(const RbfNetwork& net, std::size_t n) {
    return net.size() + n * (net.dim + 1);
}

/// CSV with header c,y_1..y_d,sigma; one row per node.
void write_solution_dump(const std::filesystem::path& path, const RbfNetwork& net);

}  // namespace srbf
