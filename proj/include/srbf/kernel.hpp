#pragma once

// Scaled Gaussian feature
//
//   phi(x; y, sigma) = sigma^s / (sqrt(2 pi) sigma)^d * exp(-|x - y|^2 / (2 sigma^2))
//
// i.e. the standard normal density with bandwidth sigma times sigma^s. The
// bandwidth is never stored directly: nodes carry an unconstrained variable
// s_var and sigma = sigma_min + (sigma_max - sigma_min) * sigmoid(s_var).

#include "srbf/types.hpp"

namespace srbf {

struct SigmaBounds {
    double min = 1e-3;
    double max = 1.0;
};

/// Exponent s = d + 2 + 0.01 used throughout the experiments.
inline double default_feature_exponent(int dim) { return dim + 2.01; }

struct FeatureParams {
    Vec y;
    double s_var = 0.0;
    SigmaBounds sigma_bounds;
    double s_exp = 3.01;

    int dim() const { return static_cast<int>(y.size()); }
};

struct SigmaValue {
    double sigma;
    double dsigma_ds;
};

SigmaValue sigma_reparam(double s_var, SigmaBounds bounds);

/// Inverse of sigma_reparam; sigma must lie strictly inside the bounds.
double sigma_to_svar(double sigma, SigmaBounds bounds);

double eval_feature(const Point& x, const FeatureParams& p);

/// Value/gradient/Hessian triple of a scalar field at a point.
struct Jet {
    double value = 0.0;
    Vec grad;
    Mat hess;

    static Jet zero(int dim) { return Jet{0.0, Vec::Zero(dim), Mat::Zero(dim, dim)}; }
};

struct FeatureJet {
    double value = 0.0;
    Vec grad_x;
    Mat hess_x;
    Vec grad_y;        // d value / d y
    Jet grad_sigma;    // d/d sigma of (value, grad_x, hess_x)
    Jet grad_svar;     // grad_sigma * dsigma/ds
};

FeatureJet feature_jet(const Point& x, const FeatureParams& p);

/// Linear functional on a jet: a*u + g.grad(u) + H:hess(u). H is kept symmetric.
struct JetFunctional {
    double a = 0.0;
    Vec g;
    Mat H;

    static JetFunctional zero(int dim) {
        return JetFunctional{0.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
    }
    static JetFunctional value(int dim) {
        auto f = zero(dim);
        f.a = 1.0;
        return f;
    }
    static JetFunctional laplacian(int dim) {
        auto f = zero(dim);
        f.H.setIdentity();
        return f;
    }
    static JetFunctional partial(int dim, int axis) {
        auto f = zero(dim);
        f.g[axis] = 1.0;
        return f;
    }
    static JetFunctional directional(const Vec& direction) {
        auto f = zero(static_cast<int>(direction.size()));
        f.g = direction;
        return f;
    }

    double apply(const Jet& j) const {
        return a * j.value + g.dot(j.grad) + (H.array() * j.hess.array()).sum();
    }

    JetFunctional& operator+=(const JetFunctional& o) {
        a += o.a;
        g += o.g;
        H += o.H;
        return *this;
    }
    JetFunctional& operator*=(double s) {
        a *= s;
        g *= s;
        H *= s;
        return *this;
    }
};

/// A JetFunctional applied to phi(.; y, sigma) at x, with its derivatives in y
/// and sigma. This is the workhorse of Jacobian assembly and dual evaluation.
struct ContractedFeature {
    double value = 0.0;
    Vec d_y;
    double d_sigma = 0.0;
};

ContractedFeature contract_feature(const JetFunctional& f, const Point& x, const Vec& y,
                                   double sigma, double s_exp, bool with_derivatives = true);

}  // namespace srbf
