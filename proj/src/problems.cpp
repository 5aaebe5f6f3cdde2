#include "srbf/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace srbf {

namespace {

constexpr double kPi = std::numbers::pi;

Jet zero_jet(const Point& x) { return Jet::zero(static_cast<int>(x.size())); }

// tanh(k (x - b)) and its first two derivatives in x.
struct TanhJet {
    double v, d1, d2;
};
TanhJet tanh_jet(double k, double shifted) {
    const double t = std::tanh(k * shifted);
    const double sech2 = 1.0 - t * t;
    return {t, k * sech2, -2.0 * k * k * t * sech2};
}

// tanh(k (R - |x - c|)) + 1
Jet radial_bump(const Point& x, const Vec& center, double k, double radius) {
    const int d = static_cast<int>(x.size());
    const Vec r = x - center;
    const double rho = std::max(r.norm(), 1e-300);
    const Vec n = r / rho;
    const double t = std::tanh(k * (radius - rho));
    const double sech2 = 1.0 - t * t;
    const double v1 = -k * sech2;                // d/d rho
    const double v2 = -2.0 * k * k * t * sech2;  // d^2/d rho^2
    Jet j;
    j.value = t + 1.0;
    j.grad = v1 * n;
    const Mat nnT = n * n.transpose();
    j.hess = v2 * nnT + (v1 / rho) * (Mat::Identity(d, d) - nnT);
    return j;
}

}  // namespace

std::string to_string(BoundaryMode mode) {
    switch (mode) {
        case BoundaryMode::L2Penalty: return "l2";
        case BoundaryMode::H1Penalty: return "h1";
        case BoundaryMode::Mask: return "mask";
    }
    return "?";
}

BoundaryMode parse_boundary_mode(const std::string& text) {
    if (text == "l2" || text == "L2" || text == "l2_penalty") return BoundaryMode::L2Penalty;
    if (text == "h1" || text == "H1" || text == "h1_penalty") return BoundaryMode::H1Penalty;
    if (text == "mask") return BoundaryMode::Mask;
    throw UsageError("unknown boundary mode '" + text + "' (expected l2, h1 or mask)");
}

bool PdeProblem::supports(BoundaryMode mode) const {
    return std::find(supported_modes.begin(), supported_modes.end(), mode) !=
           supported_modes.end();
}

void PdeProblem::validate() const {
    if (!supports(boundary_mode))
        throw UnsupportedConfiguration("problem '" + name + "' does not support boundary mode '" +
                                       to_string(boundary_mode) + "'");
    if (boundary_mode == BoundaryMode::Mask && !mask_gamma)
        throw UnsupportedConfiguration("problem '" + name + "' has no mask function");
    if (boundary_mode == BoundaryMode::H1Penalty && dim != 2)
        throw UnsupportedConfiguration("H1 boundary rows are only defined on the square (d = 2)");
}

// ---------------------------------------------------------------------------

double semilinear_residual(double source, std::span<const double> l, std::span<double> grad) {
    const double u = l[0];
    const double lap = l[1];
    grad[0] = 3.0 * u * u;
    grad[1] = -1.0;
    return -lap + u * u * u - source;
}

double eikonal_residual(double eps, double f, std::span<const double> l, std::span<double> grad) {
    const std::size_t d = l.size() - 1;
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        sq += l[i] * l[i];
        grad[i] = 2.0 * l[i];
    }
    grad[d] = -eps;
    return sq - eps * l[d] - f * f;
}

double burgers_step_residual(const BurgersStep& step, double u_prev, std::span<const double> l,
                             std::span<double> grad) {
    const double u = l[0], ux = l[1], uxx = l[2];
    const double scale = step.scaled ? step.dt : 1.0;
    grad[0] = scale * (1.0 / step.dt + ux);
    grad[1] = scale * u;
    grad[2] = -scale * step.nu;
    return scale * ((u - u_prev) / step.dt + u * ux - step.nu * uxx);
}

// ---------------------------------------------------------------------------

Jet mask_transform(const Jet& raw, const Jet& gamma, const Jet& fbar) {
    Jet u;
    u.value = fbar.value + gamma.value * raw.value;
    u.grad = fbar.grad + gamma.value * raw.grad + raw.value * gamma.grad;
    u.hess = fbar.hess + gamma.value * raw.hess + gamma.grad * raw.grad.transpose() +
             raw.grad * gamma.grad.transpose() + raw.value * gamma.hess;
    return u;
}

JetFunctional mask_adjoint(const JetFunctional& on_u, const Jet& gamma) {
    JetFunctional v;
    v.a = on_u.a * gamma.value + on_u.g.dot(gamma.grad) +
          (on_u.H.array() * gamma.hess.array()).sum();
    v.g = gamma.value * on_u.g + (on_u.H + on_u.H.transpose()) * gamma.grad;
    v.H = gamma.value * on_u.H;
    return v;
}

// ---------------------------------------------------------------------------

Jet tanh_profile_1d(const Point& x) {
    const double s = x[0];
    const auto a = tanh_jet(10.0, s + 0.2);
    const auto b = tanh_jet(10.0, s + 1.0);
    const auto c = tanh_jet(30.0, s - 0.4);
    const auto e = tanh_jet(30.0, s - 0.3);
    Jet j = Jet::zero(1);
    j.value = a.v - b.v + 0.5 * (c.v - e.v);
    j.grad[0] = a.d1 - b.d1 + 0.5 * (c.d1 - e.d1);
    j.hess(0, 0) = a.d2 - b.d2 + 0.5 * (c.d2 - e.d2);
    return j;
}

Jet two_bump_2d(const Point& x) {
    Vec c1(2), c2(2);
    c1 << 0.3, 0.3;
    c2 << -0.3, -0.3;
    Jet a = radial_bump(x, c1, 4.0, 0.30);
    const Jet b = radial_bump(x, c2, 12.0, 0.15);
    a.value += b.value;
    a.grad += b.grad;
    a.hess += b.hess;
    return a;
}

Jet sine_product(const Point& x) {
    const int d = static_cast<int>(x.size());
    Vec s(d), c(d);
    for (int i = 0; i < d; ++i) {
        s[i] = std::sin(kPi * x[i]);
        c[i] = std::cos(kPi * x[i]);
    }
    auto prod_except = [&](int i, int j) {
        double p = 1.0;
        for (int k = 0; k < d; ++k)
            if (k != i && k != j) p *= s[k];
        return p;
    };
    Jet jt = Jet::zero(d);
    jt.value = prod_except(-1, -1);
    for (int i = 0; i < d; ++i) {
        jt.grad[i] = kPi * c[i] * prod_except(i, -1);
        for (int j = 0; j < d; ++j)
            jt.hess(i, j) = (i == j) ? -kPi * kPi * jt.value
                                     : kPi * kPi * c[i] * c[j] * prod_except(i, j);
    }
    return jt;
}

Jet sines_2d(const Point& x) {
    Point scaled = 2.0 * x;
    Jet a = sine_product(x);
    Jet b = sine_product(scaled);
    // d/dx [f(2x)] = 2 f'(2x), d^2 = 4 f''(2x)
    a.value += 2.0 * b.value;
    a.grad += 4.0 * b.grad;
    a.hess += 8.0 * b.hess;
    return a;
}

Jet box_mask(const Point& x) {
    const int d = static_cast<int>(x.size());
    Vec f(d), df(d);
    for (int i = 0; i < d; ++i) {
        f[i] = 1.0 - x[i] * x[i];
        df[i] = -2.0 * x[i];
    }
    auto prod_except = [&](int i, int j) {
        double p = 1.0;
        for (int k = 0; k < d; ++k)
            if (k != i && k != j) p *= f[k];
        return p;
    };
    Jet g = Jet::zero(d);
    g.value = prod_except(-1, -1);
    for (int i = 0; i < d; ++i) {
        g.grad[i] = df[i] * prod_except(i, -1);
        for (int j = 0; j < d; ++j)
            g.hess(i, j) = (i == j) ? -2.0 * prod_except(i, -1) : df[i] * df[j] * prod_except(i, j);
    }
    return g;
}

// ---------------------------------------------------------------------------

PdeProblem make_semilinear(std::string name, int dim, JetFn exact, BoundaryMode mode) {
    PdeProblem p;
    p.name = std::move(name);
    p.dim = dim;
    p.domain = Box::cube(dim, -1.0, 1.0);
    p.interior.ops = {JetFunctional::value(dim), JetFunctional::laplacian(dim)};
    p.interior.residual = [exact](const Point& x, std::span<const double> l,
                                  std::span<double> grad) {
        const Jet u = exact(x);
        const double source = -u.hess.trace() + u.value * u.value * u.value;
        return semilinear_residual(source, l, grad);
    };
    p.boundary.ops = {JetFunctional::value(dim)};
    p.boundary.residual = [exact](const Point& x, std::span<const double> l,
                                  std::span<double> grad) {
        grad[0] = 1.0;
        return l[0] - exact(x).value;
    };
    p.boundary_data = exact;
    p.exact = exact;
    p.boundary_mode = mode;
    p.supported_modes = {BoundaryMode::L2Penalty};
    if (dim == 2) p.supported_modes.push_back(BoundaryMode::H1Penalty);
    return p;
}

PdeProblem make_eikonal(double eps, BoundaryMode mode) {
    if (!(eps > 0.0)) throw UsageError("Eikonal viscosity eps must be positive");
    constexpr int d = 2;
    PdeProblem p;
    p.name = "eikonal";
    p.dim = d;
    p.domain = Box::cube(d, -1.0, 1.0);
    p.interior.ops = {JetFunctional::partial(d, 0), JetFunctional::partial(d, 1),
                      JetFunctional::laplacian(d)};
    p.interior.residual = [eps](const Point&, std::span<const double> l, std::span<double> grad) {
        return eikonal_residual(eps, 1.0, l, grad);
    };
    p.boundary.ops = {JetFunctional::value(d)};
    p.boundary.residual = [](const Point&, std::span<const double> l, std::span<double> grad) {
        grad[0] = 1.0;
        return l[0];
    };
    p.boundary_data = zero_jet;
    p.boundary_mode = mode;
    p.supported_modes = {BoundaryMode::L2Penalty, BoundaryMode::H1Penalty, BoundaryMode::Mask};
    p.mask_gamma = box_mask;
    return p;
}

PdeProblem make_burgers_step(const BurgersStep& step, std::function<double(double)> previous,
                             BoundaryMode mode) {
    if (!(step.dt > 0.0)) throw UsageError("Burgers time step must be positive");
    if (!previous) throw UsageError("Burgers step needs the previous state");
    PdeProblem p;
    p.name = "burgers";
    p.dim = 1;
    p.domain = Box::cube(1, -1.0, 1.0);
    p.interior.ops = {JetFunctional::value(1), JetFunctional::partial(1, 0),
                      JetFunctional::laplacian(1)};
    p.interior.residual = [step, previous](const Point& x, std::span<const double> l,
                                           std::span<double> grad) {
        return burgers_step_residual(step, previous(x[0]), l, grad);
    };
    p.boundary.ops = {JetFunctional::value(1)};
    p.boundary.residual = [](const Point&, std::span<const double> l, std::span<double> grad) {
        grad[0] = 1.0;
        return l[0];
    };
    p.boundary_data = zero_jet;
    p.boundary_mode = mode;
    p.supported_modes = {BoundaryMode::L2Penalty, BoundaryMode::Mask};
    // gamma = (x + 1)(x - 1)
    p.mask_gamma = [](const Point& x) {
        Jet g = Jet::zero(1);
        g.value = x[0] * x[0] - 1.0;
        g.grad[0] = 2.0 * x[0];
        g.hess(0, 0) = 2.0;
        return g;
    };
    return p;
}

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = {
        "semilinear1d", "semilinear2d_twobump", "semilinear4d", "sines2d", "eikonal", "burgers"};
    return names;
}

PdeProblem make_problem(const std::string& name, const ProblemOptions& options) {
    PdeProblem p;
    if (name == "semilinear1d") {
        p = make_semilinear(name, 1, tanh_profile_1d, options.boundary_mode);
    } else if (name == "semilinear2d_twobump") {
        p = make_semilinear(name, 2, two_bump_2d, options.boundary_mode);
    } else if (name == "semilinear4d") {
        p = make_semilinear(name, 4, sine_product, options.boundary_mode);
        p.supported_modes.push_back(BoundaryMode::Mask);
        p.mask_gamma = box_mask;
    } else if (name == "sines2d") {
        p = make_semilinear(name, 2, sines_2d, options.boundary_mode);
        p.supported_modes.push_back(BoundaryMode::Mask);
        p.mask_gamma = box_mask;
    } else if (name == "eikonal") {
        p = make_eikonal(options.eikonal_eps, options.boundary_mode);
    } else if (name == "burgers") {
        auto prev = options.burgers_previous;
        if (!prev) prev = [](double x) { return -std::sin(kPi * x); };
        p = make_burgers_step(options.burgers, prev, options.boundary_mode);
    } else {
        throw UsageError("unknown problem '" + name + "'");
    }
    return p;
}

// ---------------------------------------------------------------------------

std::vector<ResidualRow> boundary_rows(const CollocationSet& pts, BoundaryMode mode) {
    std::vector<ResidualRow> rows;
    if (mode == BoundaryMode::Mask) return rows;
    if (mode == BoundaryMode::H1Penalty && pts.dim() != 2)
        throw UnsupportedConfiguration("H1 boundary rows are only defined on the square (d = 2)");

    for (std::size_t k = 0; k < pts.boundary.size(); ++k)
        rows.push_back(ResidualRow{RowKind::BoundaryValue, k, Vec()});
    if (mode == BoundaryMode::H1Penalty) {
        for (std::size_t k = 0; k < pts.boundary.size(); ++k) {
            const auto facets = active_facets(pts.boundary[k], pts.domain);
            if (facets.size() != 1) continue;  // corner: tangent undefined
            Vec t = Vec::Zero(2);
            t[1 - facets[0]] = 1.0;
            rows.push_back(ResidualRow{RowKind::BoundaryTangent, k, t});
        }
    }
    return rows;
}

std::vector<ResidualRow> residual_rows(const CollocationSet& pts, BoundaryMode mode) {
    std::vector<ResidualRow> rows;
    rows.reserve(pts.interior.size() + pts.boundary.size());
    for (std::size_t k = 0; k < pts.interior.size(); ++k)
        rows.push_back(ResidualRow{RowKind::Interior, k, Vec()});
    auto b = boundary_rows(pts, mode);
    rows.insert(rows.end(), b.begin(), b.end());
    return rows;
}

ResidualSystem::ResidualSystem(CollocationSet pts, PdeProblem prob)
    : pts_(std::move(pts)), prob_(std::move(prob)) {
    prob_.validate();
    if (pts_.dim() != prob_.dim)
        throw UsageError("collocation dimension " + std::to_string(pts_.dim()) +
                         " does not match problem dimension " + std::to_string(prob_.dim));
    rows_ = residual_rows(pts_, prob_.boundary_mode);
    weights_ = weight_matrix(pts_, rows_);

    const std::size_t n = rows_.size();
    points_.reserve(n);
    tangent_ops_.resize(n);
    tangent_target_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& row = rows_[k];
        points_.push_back(row_point(pts_, row));
        if (row.kind == RowKind::BoundaryTangent) {
            tangent_ops_[k] = {JetFunctional::directional(row.tangent)};
            tangent_target_[k] = row.tangent.dot(prob_.boundary_data(points_[k]).grad);
        }
    }
    if (masked()) {
        gamma_.reserve(n);
        fbar_.reserve(n);
        for (const auto& x : points_) {
            gamma_.push_back(prob_.mask_gamma(x));
            fbar_.push_back(prob_.mask_fbar ? prob_.mask_fbar(x) : Jet::zero(prob_.dim));
        }
    }
}

std::span<const JetFunctional> ResidualSystem::ops(std::size_t row) const {
    switch (rows_[row].kind) {
        case RowKind::Interior: return prob_.interior.ops;
        case RowKind::BoundaryValue: return prob_.boundary.ops;
        case RowKind::BoundaryTangent: return tangent_ops_[row];
    }
    return {};
}

double ResidualSystem::residual(std::size_t row, std::span<const double> l,
                                std::span<double> grad) const {
    switch (rows_[row].kind) {
        case RowKind::Interior: return prob_.interior.residual(points_[row], l, grad);
        case RowKind::BoundaryValue: return prob_.boundary.residual(points_[row], l, grad);
        case RowKind::BoundaryTangent:
            grad[0] = 1.0;
            return l[0] - tangent_target_[row];
    }
    return 0.0;
}

Jet ResidualSystem::solution_jet(std::size_t row, const Jet& raw) const {
    return masked() ? mask_transform(raw, gamma_[row], fbar_[row]) : raw;
}

JetFunctional ResidualSystem::pull_back(std::size_t row, const JetFunctional& on_u) const {
    return masked() ? mask_adjoint(on_u, gamma_[row]) : on_u;
}

}  // namespace srbf
