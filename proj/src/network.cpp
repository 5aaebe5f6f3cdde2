#include "srbf/network.hpp"

#include "srbf/io.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace srbf {

namespace {

// Per-node quantities that are constant while evaluating at many points.
struct NodeCache {
    double c;
    Vec y;
    double sigma;
    double inv_s2;
    double amp;  // sigma^(s-d) (2 pi)^(-d/2)
};

std::vector<NodeCache> cache_nodes(const RbfNetwork& net) {
    std::vector<NodeCache> out;
    out.reserve(net.size());
    const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * net.dim);
    for (std::size_t n = 0; n < net.size(); ++n) {
        const double sigma = net.sigma(n);
        out.push_back(NodeCache{net.nodes[n].c, net.nodes[n].y, sigma, 1.0 / (sigma * sigma),
                                std::pow(sigma, net.s_exp - net.dim) * norm});
    }
    return out;
}

Jet accumulate_jet(const std::vector<NodeCache>& nodes, const Point& x, int d, bool hessian) {
    Jet j = Jet::zero(d);
    for (const auto& nd : nodes) {
        if (nd.c == 0.0) continue;
        const Vec r = x - nd.y;
        const double rho2 = r.squaredNorm();
        const double cphi = nd.c * nd.amp * std::exp(-0.5 * rho2 * nd.inv_s2);
        j.value += cphi;
        j.grad.noalias() -= (cphi * nd.inv_s2) * r;
        if (hessian) {
            const double w = cphi * nd.inv_s2 * nd.inv_s2;
            j.hess.noalias() += w * (r * r.transpose());
            j.hess.diagonal().array() -= cphi * nd.inv_s2;
        }
    }
    return j;
}

double accumulate_value(const std::vector<NodeCache>& nodes, const Point& x) {
    double v = 0.0;
    for (const auto& nd : nodes) {
        if (nd.c == 0.0) continue;
        v += nd.c * nd.amp * std::exp(-0.5 * (x - nd.y).squaredNorm() * nd.inv_s2);
    }
    return v;
}

bool needs_hessian(std::span<const JetFunctional> ops) {
    for (const auto& op : ops)
        if (op.H.size() > 0 && !op.H.isZero(0.0)) return true;
    return false;
}

}  // namespace

SolutionJet eval_jet(const RbfNetwork& net, const Point& x) {
    if (x.size() != net.dim) throw UsageError("eval_jet: point dimension mismatch");
    return accumulate_jet(cache_nodes(net), x, net.dim, true);
}

double eval_value(const RbfNetwork& net, const Point& x) {
    if (x.size() != net.dim) throw UsageError("eval_value: point dimension mismatch");
    return accumulate_value(cache_nodes(net), x);
}

SolutionJet solution_jet(const RbfNetwork& net, const PdeProblem& prob, const Point& x) {
    Jet raw = eval_jet(net, x);
    if (prob.boundary_mode != BoundaryMode::Mask) return raw;
    const Jet fbar = prob.mask_fbar ? prob.mask_fbar(x) : Jet::zero(net.dim);
    return mask_transform(raw, prob.mask_gamma(x), fbar);
}

double solution_value(const RbfNetwork& net, const PdeProblem& prob, const Point& x) {
    const double v = eval_value(net, x);
    if (prob.boundary_mode != BoundaryMode::Mask) return v;
    const double fbar = prob.mask_fbar ? prob.mask_fbar(x).value : 0.0;
    return fbar + prob.mask_gamma(x).value * v;
}

std::vector<OperatorValues> batch_linear_ops(const RbfNetwork& net, const ResidualSystem& sys) {
    if (net.dim != sys.dim()) throw UsageError("network and problem dimensions differ");
    const auto nodes = cache_nodes(net);
    std::vector<OperatorValues> out;
    out.reserve(sys.size());
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const auto ops = sys.ops(k);
        const Jet u = sys.solution_jet(k, accumulate_jet(nodes, sys.point(k), net.dim, true));
        OperatorValues l(static_cast<Eigen::Index>(ops.size()));
        for (std::size_t i = 0; i < ops.size(); ++i) l[static_cast<Eigen::Index>(i)] = ops[i].apply(u);
        out.push_back(l);
    }
    return out;
}

ResidualState evaluate_residual(const RbfNetwork& net, const ResidualSystem& sys,
                                bool with_sensitivity) {
    if (net.dim != sys.dim()) throw UsageError("network and problem dimensions differ");
    const auto nodes = cache_nodes(net);
    const int d = net.dim;
    ResidualState st;
    st.R.resize(static_cast<Eigen::Index>(sys.size()));
    if (with_sensitivity) st.sensitivity.reserve(sys.size());

    std::array<double, kMaxOperators> l{};
    std::array<double, kMaxOperators> grad{};
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const auto ops = sys.ops(k);
        const bool hess = needs_hessian(ops);
        const Jet u = sys.solution_jet(k, accumulate_jet(nodes, sys.point(k), d, hess));
        for (std::size_t i = 0; i < ops.size(); ++i) l[i] = ops[i].apply(u);
        const double r = sys.residual(k, std::span<const double>(l.data(), ops.size()),
                                      std::span<double>(grad.data(), ops.size()));
        st.R[static_cast<Eigen::Index>(k)] = r;
        if (with_sensitivity) {
            JetFunctional on_u = JetFunctional::zero(d);
            for (std::size_t i = 0; i < ops.size(); ++i) {
                on_u.a += grad[i] * ops[i].a;
                on_u.g += grad[i] * ops[i].g;
                on_u.H += grad[i] * ops[i].H;
            }
            on_u.H = 0.5 * (on_u.H + on_u.H.transpose());
            st.sensitivity.push_back(sys.pull_back(k, on_u));
        }
    }
    return st;
}

MatrixX assemble_jacobian(const RbfNetwork& net, const ResidualSystem& sys,
                          const ResidualState& state, const AssemblyOptions& options) {
    const std::size_t K = sys.size();
    const std::size_t N = net.size();
    const int d = net.dim;
    MatrixX J(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(net.num_variables()));
    if (N == 0) return J;

    std::vector<JetFunctional> flipped;
    const std::vector<JetFunctional>* sens = &state.sensitivity;
    if (options.flip_hessian_sign) {
        flipped = state.sensitivity;
        for (auto& f : flipped) f.H = -f.H;
        sens = &flipped;
    }

    for (std::size_t n = 0; n < N; ++n) {
        const auto& node = net.nodes[n];
        const auto [sigma, dsigma_ds] = sigma_reparam(node.s_var, net.sigma_bounds);
        const auto cn = static_cast<Eigen::Index>(n);
        const auto wn = static_cast<Eigen::Index>(omega_column(net, n));
        const bool active = node.c != 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto row = static_cast<Eigen::Index>(k);
            const auto cf =
                contract_feature((*sens)[k], sys.point(k), node.y, sigma, net.s_exp, active);
            J(row, cn) = cf.value;
            if (active) {
                for (int i = 0; i < d; ++i) J(row, wn + i) = node.c * cf.d_y[i];
                J(row, wn + d) = node.c * cf.d_sigma * dsigma_ds;
            } else {
                for (int i = 0; i <= d; ++i) J(row, wn + i) = 0.0;
            }
        }
    }
    return J;
}

Assembly assemble_residual_and_jacobian(const RbfNetwork& net, const ResidualSystem& sys,
                                        const AssemblyOptions& options) {
    auto state = evaluate_residual(net, sys, true);
    Assembly a;
    a.J = assemble_jacobian(net, sys, state, options);
    a.R = std::move(state.R);
    return a;
}

void write_solution_dump(const std::filesystem::path& path, const RbfNetwork& net) {
    std::ostringstream out;
    out << "c";
    for (int i = 1; i <= net.dim; ++i) out << ",y_" << i;
    out << ",sigma\n";
    for (std::size_t n = 0; n < net.size(); ++n) {
        out << format_double(net.nodes[n].c);
        for (int i = 0; i < net.dim; ++i) out << ',' << format_double(net.nodes[n].y[i]);
        out << ',' << format_double(net.sigma(n)) << '\n';
    }
    write_file_atomic(path, out.str());
}

}  // namespace srbf
