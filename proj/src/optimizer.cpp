#include "srbf/optimizer.hpp"

#include "srbf/io.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace srbf {

void SolverConfig::validate() const {
    if (alpha_ladder.empty()) {
        if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
    } else {
        for (std::size_t i = 0; i < alpha_ladder.size(); ++i) {
            if (!(alpha_ladder[i] > 0.0)) throw UsageError("alpha_ladder entries must be positive");
            if (i > 0 && !(alpha_ladder[i] < alpha_ladder[i - 1]))
                throw UsageError("alpha_ladder must be strictly decreasing");
        }
    }
    if (m_candidates == 0) throw UsageError("m_candidates must be at least 1");
    if (eta < 0.0) throw UsageError("eta must be non-negative");
    if (metropolis_T0 < 0.0) throw UsageError("metropolis_T0 must be non-negative");
    if (!(linesearch_h > 0.0 && linesearch_h < 1.0))
        throw UsageError("linesearch_h must lie in (0, 1)");
    if (!(lm_eps > 0.0)) throw UsageError("lm_eps must be positive");
    if (!(stop_eps > 0.0)) throw UsageError("stop_eps must be positive");
    if (max_outer == 0) throw UsageError("max_outer must be at least 1");
    if (!(sigma_bounds.min > 0.0 && sigma_bounds.min < sigma_bounds.max))
        throw UsageError("sigma bounds must satisfy 0 < min < max");
}

void sync_weights(RbfNetwork& net, double alpha) {
    for (auto& n : net.nodes) n.c = prox(n.q, alpha);
}

// ---------------------------------------------------------------------------
// DualField

namespace {

// Beyond this exponent the Gaussian factor is below 1e-17 of its peak.
constexpr double kExpCutoff = 40.0;

// Sum over rows of exp(-|x_k - y|^2 / 2 sigma^2) * Q_k(x_k - y); D = 0 means runtime d.
template <int D>
double dual_sum(int d_rt, std::size_t rows, const double* x, const double* a, const double* g,
                const double* h, const double* tr, const double* y, double sigma) {
    const int d = D > 0 ? D : d_rt;
    const double is2 = 1.0 / (sigma * sigma);
    const double half = 0.5 * is2;
    const double is4 = is2 * is2;
    double acc = 0.0;
    double r[kMaxDim];
    for (std::size_t k = 0; k < rows; ++k) {
        const double* xk = x + k * d;
        double rho2 = 0.0;
        for (int i = 0; i < d; ++i) {
            r[i] = xk[i] - y[i];
            rho2 += r[i] * r[i];
        }
        const double t = rho2 * half;
        if (t > kExpCutoff) continue;
        const double* gk = g + k * d;
        const double* hk = h + k * d * d;
        double gr = 0.0;
        double rhr = 0.0;
        for (int i = 0; i < d; ++i) {
            gr += gk[i] * r[i];
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += hk[i * d + j] * r[j];
            rhr += r[i] * s;
        }
        acc += std::exp(-t) * (a[k] - (gr + tr[k]) * is2 + rhr * is4);
    }
    return acc;
}

}  // namespace

DualField::DualField(const ResidualSystem& sys, const ResidualState& state, double s_exp)
    : dim_(sys.dim()), s_exp_(s_exp) {
    const VectorX& w = sys.weights();
    const int d = dim_;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const double coef = w[static_cast<Eigen::Index>(k)] * state.R[static_cast<Eigen::Index>(k)];
        if (coef == 0.0) continue;
        JetFunctional f = state.sensitivity[k];
        f *= coef;
        const Point& xk = sys.point(k);
        for (int i = 0; i < d; ++i) x_.push_back(xk[i]);
        a_.push_back(f.a);
        for (int i = 0; i < d; ++i) g_.push_back(f.g[i]);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) h_.push_back(f.H(i, j));
        tr_.push_back(f.H.trace());
        points_.push_back(xk);
        weighted_.push_back(std::move(f));
        ++rows_;
    }
}

double DualField::operator()(const Vec& y, double sigma) const {
    if (rows_ == 0) return 0.0;
    const double amp = std::pow(sigma, s_exp_ - dim_) * std::pow(2.0 * std::numbers::pi, -0.5 * dim_);
    const double* args[] = {x_.data(), a_.data(), g_.data(), h_.data(), tr_.data()};
    double s = 0.0;
    switch (dim_) {
    case 1: s = dual_sum<1>(1, rows_, args[0], args[1], args[2], args[3], args[4], y.data(), sigma); break;
    case 2: s = dual_sum<2>(2, rows_, args[0], args[1], args[2], args[3], args[4], y.data(), sigma); break;
    case 3: s = dual_sum<3>(3, rows_, args[0], args[1], args[2], args[3], args[4], y.data(), sigma); break;
    case 4: s = dual_sum<4>(4, rows_, args[0], args[1], args[2], args[3], args[4], y.data(), sigma); break;
    default:
        s = dual_sum<0>(dim_, rows_, args[0], args[1], args[2], args[3], args[4], y.data(), sigma);
    }
    return amp * s;
}

DualField::Gradient DualField::with_gradient(const Vec& y, double sigma) const {
    Gradient out;
    out.d_y = Vec::Zero(dim_);
    for (std::size_t k = 0; k < rows_; ++k) {
        const auto cf = contract_feature(weighted_[k], points_[k], y, sigma, s_exp_, true);
        out.p += cf.value;
        out.d_y += cf.d_y;
        out.d_sigma += cf.d_sigma;
    }
    return out;
}

double dual_variable(const RbfNetwork& net, const ResidualSystem& sys, const FeatureParams& omega) {
    if (omega.dim() != sys.dim()) throw UsageError("dual_variable: candidate dimension mismatch");
    const auto state = evaluate_residual(net, sys, true);
    const DualField field(sys, state, omega.s_exp);
    return field(omega.y, sigma_reparam(omega.s_var, omega.sigma_bounds).sigma);
}

Candidate best_candidate(const DualField& field, const Box& box, SigmaBounds bounds,
                         std::size_t m, std::mt19937_64& rng) {
    const int d = box.dim();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Candidate best;
    best.y = Vec::Zero(d);
    best.sigma = 0.5 * (bounds.min + bounds.max);
    Vec y(d);
    for (std::size_t i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) y[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
        double sigma = bounds.min;
        while (sigma <= bounds.min) sigma = bounds.min + (bounds.max - bounds.min) * unit(rng);
        const double p = field(y, sigma);
        if (i == 0 || std::abs(p) > std::abs(best.p)) {
            best.y = y;
            best.sigma = sigma;
            best.p = p;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Phase I

double metropolis_probability(double threshold, double p_hat, double temperature,
                              double annealing) {
    const double gap = threshold - p_hat;
    if (gap <= 0.0) return 1.0;
    const double scale = threshold * temperature * annealing;
    if (!(scale > 0.0)) return 0.0;
    return std::min(1.0, std::exp(-gap / scale));
}

double annealing_factor(double loss, double initial_loss) {
    const double ratio = loss / std::max(initial_loss, 1e-12);
    return std::clamp(std::sqrt(std::max(ratio, 0.0)), 1e-6, 1.0);
}

InsertionOutcome phase1_insert(RbfNetwork& net, const ResidualSystem& sys,
                               const ResidualState& state, const SolverConfig& cfg,
                               double annealing, std::mt19937_64& rng) {
    InsertionOutcome out;
    const double alpha = cfg.alpha;
    const DualField field(sys, state, net.s_exp);

    double p0 = 0.0;
    for (std::size_t n = 0; n < net.size(); ++n) {
        const auto g = field.with_gradient(net.nodes[n].y, net.sigma(n));
        out.max_dual_active = std::max(out.max_dual_active, std::abs(g.p));
        // grad_{y_n} L = c_n * d p / d y at omega_n
        p0 = std::max(p0, std::abs(g.p) + cfg.eta * std::abs(net.nodes[n].c) * g.d_y.norm());
    }
    out.threshold = std::max(alpha, p0);
    if (field.trivial()) return out;

    const Candidate cand =
        best_candidate(field, sys.points().candidate_box, net.sigma_bounds, cfg.m_candidates, rng);
    out.p_hat = std::abs(cand.p);

    bool accept = out.p_hat > out.threshold;
    if (!accept && cfg.metropolis_T0 > 0.0 && out.p_hat > alpha) {
        const double temperature = std::max(1.0, -std::log(alpha)) * cfg.metropolis_T0;
        const double pr = metropolis_probability(out.threshold, out.p_hat, temperature, annealing);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        accept = unit(rng) < pr;
    }
    if (!accept) return out;

    KernelNode node;
    node.y = cand.y;
    node.s_var = sigma_to_svar(cand.sigma, net.sigma_bounds);
    node.q = cand.p > 0.0 ? -alpha : alpha;
    node.c = 0.0;
    net.nodes.push_back(std::move(node));
    out.inserted = true;
    return out;
}

// ---------------------------------------------------------------------------
// Phase II

NormalMap normal_map(const RbfNetwork& net, const ResidualSystem& sys, const ResidualState& state,
                     const MatrixX& J, double alpha, double lm_eps, double damping) {
    const auto N = static_cast<Eigen::Index>(net.size());
    const auto nv = static_cast<Eigen::Index>(net.num_variables());
    const int d = net.dim;
    const VectorX& w = sys.weights();
    const VectorX wr = w.cwiseProduct(state.R);

    NormalMap nm;
    nm.G = J.transpose() * wr;
    nm.dp = VectorX::Ones(nv);
    for (Eigen::Index n = 0; n < N; ++n) {
        const auto& node = net.nodes[static_cast<std::size_t>(n)];
        nm.G[n] += node.q - node.c;
        nm.dp[n] = dprox(node.q, alpha);
    }

    const MatrixX js = w.cwiseSqrt().asDiagonal() * J;
    MatrixX H = MatrixX::Zero(nv, nv);
    H.selfadjointView<Eigen::Lower>().rankUpdate(js.transpose());
    nm.DG = H.selfadjointView<Eigen::Lower>();

    const double cor = 0.1 * wr.lpNorm<1>() * damping;
    for (Eigen::Index n = 0; n < N; ++n) {
        nm.DG(n, n) += cor * lm_eps;
        const double cn = std::abs(net.nodes[static_cast<std::size_t>(n)].c);
        const auto base = static_cast<Eigen::Index>(omega_column(net, static_cast<std::size_t>(n)));
        for (int i = 0; i <= d; ++i) nm.DG(base + i, base + i) += cor * cn;
    }

    for (Eigen::Index j = 0; j < nv; ++j) {
        if (nm.dp[j] != 1.0) {
            nm.DG.col(j) *= nm.dp[j];
            nm.DG(j, j) += 1.0 - nm.dp[j];
        }
    }
    // A node with c = 0 does not influence R through its center or bandwidth:
    // those rows and columns vanish. Freeze them (z = 0) instead of failing.
    for (Eigen::Index n = 0; n < N; ++n) {
        if (net.nodes[static_cast<std::size_t>(n)].c != 0.0) continue;
        const auto base = static_cast<Eigen::Index>(omega_column(net, static_cast<std::size_t>(n)));
        for (int i = 0; i <= d; ++i) nm.DG(base + i, base + i) = 1.0;
    }
    return nm;
}

double regularized_objective(const RbfNetwork& net, const ResidualState& state,
                             const VectorX& w, double alpha) {
    double l1 = 0.0;
    for (const auto& n : net.nodes) l1 += std::abs(n.c);
    return state.loss(w) + alpha * l1;
}

namespace {

RbfNetwork displaced(const RbfNetwork& net, const VectorX& z, double theta, double alpha) {
    RbfNetwork out = net;
    const int d = net.dim;
    for (std::size_t n = 0; n < net.size(); ++n) {
        auto& node = out.nodes[n];
        node.q += theta * z[static_cast<Eigen::Index>(n)];
        node.c = prox(node.q, alpha);
        const auto base = static_cast<Eigen::Index>(omega_column(net, n));
        for (int i = 0; i < d; ++i) node.y[i] += theta * z[base + i];
        node.s_var += theta * z[base + d];
    }
    return out;
}

}  // namespace

StepOutcome gauss_newton_step(RbfNetwork& net, const ResidualSystem& sys,
                              const ResidualState& state, const SolverConfig& cfg, double alpha) {
    StepOutcome out;
    const VectorX& w = sys.weights();
    out.objective_before = regularized_objective(net, state, w, alpha);
    out.objective_after = out.objective_before;
    if (net.size() == 0) return out;

    const MatrixX J = assemble_jacobian(net, sys, state);
    double damping = 1.0;
    for (int attempt = 0; attempt <= kMaxDampingRetries; ++attempt, damping *= 10.0) {
        const NormalMap nm = normal_map(net, sys, state, J, alpha, cfg.lm_eps, damping);
        const Eigen::PartialPivLU<MatrixX> lu(nm.DG);
        const VectorX z = lu.solve(-nm.G);
        if (!z.allFinite()) throw SolverFault("Newton system is singular");

        const double predicted = nm.G.dot(nm.dp.cwiseProduct(z));
        if (attempt == 0) out.predicted = predicted;
        const double bound = std::min(predicted, 0.0);

        double theta = 1.0;
        for (int i = 0; i <= kMaxStepShrinks; ++i, theta *= kStepShrink) {
            RbfNetwork trial = displaced(net, z, theta, alpha);
            bool finite = true;
            for (const auto& n : trial.nodes) finite = finite && std::isfinite(n.s_var) && n.y.allFinite();
            if (!finite) continue;
            ResidualState st = evaluate_residual(trial, sys, true);
            const double f = regularized_objective(trial, st, w, alpha);
            if (std::isfinite(f) && f - out.objective_before <= cfg.linesearch_h * theta * bound) {
                out.accepted = true;
                out.theta = theta;
                out.damping = damping;
                out.predicted = predicted;
                out.objective_after = f;
                out.state = std::move(st);
                net = std::move(trial);
                return out;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase III and stopping

void phase3_prune(RbfNetwork& net) {
    std::erase_if(net.nodes, [](const KernelNode& n) { return n.c == 0.0; });
}

bool stopping_check(double estimated_descent, double best_candidate_dual, double alpha,
                    double stop_eps) {
    return std::abs(estimated_descent) < stop_eps && best_candidate_dual - alpha < stop_eps;
}

// ---------------------------------------------------------------------------
// Drivers

SolveResult solve(RbfNetwork net0, const ResidualSystem& sys, const SolverConfig& cfg,
                  const IterationCallback& on_iter) {
    cfg.validate();
    if (net0.dim != sys.dim()) throw UsageError("initial network dimension differs from problem");
    const double alpha = cfg.alpha;
    SolveResult res;
    res.net = std::move(net0);
    RbfNetwork& net = res.net;
    sync_weights(net, alpha);
    phase3_prune(net);

    std::mt19937_64 rng(cfg.seed);
    const VectorX& w = sys.weights();
    ResidualState state = evaluate_residual(net, sys, true);
    const double initial_loss = state.loss(w);

    for (std::size_t it = 1; it <= cfg.max_outer; ++it) {
        const double annealing = annealing_factor(state.loss(w), initial_loss);
        const InsertionOutcome ins = phase1_insert(net, sys, state, cfg, annealing, rng);

        StepOutcome step = gauss_newton_step(net, sys, state, cfg, alpha);
        if (step.accepted) state = std::move(step.state);
        phase3_prune(net);

        IterTrace tr;
        tr.iter = it;
        tr.loss = state.loss(w);
        tr.reg_objective = regularized_objective(net, state, w, alpha);
        tr.n_nodes = net.size();
        tr.max_dual_active = ins.max_dual_active;
        tr.max_dual_candidate = ins.p_hat;
        tr.accepted_insertion = ins.inserted;
        tr.step_size = step.accepted ? step.theta : 0.0;
        tr.estimated_descent = std::abs(step.predicted);
        tr.alpha = alpha;
        res.trace.push_back(tr);
        if (on_iter) on_iter(tr);

        if (stopping_check(step.predicted, ins.p_hat, alpha, cfg.stop_eps)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

SolveResult continuation_solve(const ResidualSystem& sys, const SolverConfig& cfg,
                               std::optional<RbfNetwork> init, const IterationCallback& on_iter) {
    cfg.validate();
    const std::vector<double> ladder =
        cfg.alpha_ladder.empty() ? std::vector<double>{cfg.alpha} : cfg.alpha_ladder;

    RbfNetwork net;
    if (init) {
        net = std::move(*init);
    } else {
        net = RbfNetwork::empty(sys.dim());
        if (cfg.s_exp > 0.0) net.s_exp = cfg.s_exp;
        net.sigma_bounds = cfg.sigma_bounds;
    }

    SolveResult out;
    for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
        SolverConfig c = cfg;
        c.alpha = ladder[stage];
        c.alpha_ladder.clear();
        c.seed = cfg.seed + stage;
        SolveResult r = solve(std::move(net), sys, c, on_iter);
        net = std::move(r.net);
        out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
        out.converged = r.converged;
    }
    out.net = std::move(net);
    return out;
}

double burgers_initial_condition(double x) { return -std::sin(std::numbers::pi * x); }

namespace {

double march_value(const RbfNetwork& net, BoundaryMode mode, double x) {
    Point p(1);
    p[0] = x;
    const double v = eval_value(net, p);
    return mode == BoundaryMode::Mask ? (x * x - 1.0) * v : v;
}

}  // namespace

double MarchResult::value(std::size_t n, double x) const {
    if (n == 0) return burgers_initial_condition(x);
    return march_value(networks.at(n - 1), boundary_mode, x);
}

double MarchResult::interpolate(double t, double x) const {
    const std::size_t last = times.size() - 1;
    if (last == 0 || t <= 0.0) return value(0, x);
    if (t >= times[last]) return value(last, x);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto n = static_cast<std::size_t>(it - times.begin()) - 1;
    const double s = (t - times[n]) / (times[n + 1] - times[n]);
    return (1.0 - s) * value(n, x) + s * value(n + 1, x);
}

MarchResult time_march(const CollocationSet& pts, const SolverConfig& cfg,
                       const MarchConfig& march) {
    cfg.validate();
    if (pts.dim() != 1) throw UsageError("time_march expects one-dimensional collocation points");
    if (!(march.step.dt > 0.0)) throw UsageError("dt must be positive");
    if (march.t_end < 0.0) throw UsageError("t_end must be non-negative");

    MarchResult res;
    res.boundary_mode = march.boundary_mode;
    res.step = march.step;
    res.times.push_back(0.0);

    const double dt = march.step.dt;
    const auto n_steps = static_cast<std::size_t>(std::ceil(march.t_end / dt - 1e-9));
    const double scale = march.step.scaled ? dt * dt : 1.0;

    SolverConfig step_cfg = cfg;
    step_cfg.alpha *= scale;
    for (auto& a : step_cfg.alpha_ladder) a *= scale;

    std::optional<RbfNetwork> warm;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        std::function<double(double)> previous;
        if (n == 1) {
            previous = burgers_initial_condition;
        } else {
            previous = [net = res.networks.back(), mode = march.boundary_mode](double x) {
                return march_value(net, mode, x);
            };
        }
        ResidualSystem sys(pts, make_burgers_step(march.step, std::move(previous), march.boundary_mode));
        SolverConfig c = step_cfg;
        c.seed = cfg.seed + n;
        SolveResult r = continuation_solve(sys, c, warm);
        res.trace.insert(res.trace.end(), r.trace.begin(), r.trace.end());
        res.iterations.push_back(r.trace.size());
        res.networks.push_back(r.net);
        res.times.push_back(static_cast<double>(n) * dt);
        warm = std::move(r.net);
        if (!r.converged && march.abort_on_nonconvergence) {
            res.completed = false;
            std::ostringstream msg;
            msg << "step " << n << " did not reach the stopping criterion within " << cfg.max_outer
                << " iterations";
            res.failure = msg.str();
            break;
        }
    }
    return res;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterTrace>& trace) {
    std::ostringstream out;
    out << "iter,alpha,loss,reg_objective,n_nodes,max_dual_active,max_dual_candidate,"
           "accepted_insertion,step_size,estimated_descent\n";
    for (const auto& t : trace) {
        out << t.iter << ',' << format_double(t.alpha) << ',' << format_double(t.loss) << ','
            << format_double(t.reg_objective) << ',' << t.n_nodes << ','
            << format_double(t.max_dual_active) << ',' << format_double(t.max_dual_candidate) << ','
            << (t.accepted_insertion ? 1 : 0) << ',' << format_double(t.step_size) << ','
            << format_double(t.estimated_descent) << '\n';
    }
    write_file_atomic(path, out.str());
}

}  // namespace srbf
