#pragma once

// Reference solutions without a closed form, used in place of an exact
// solution when measuring errors.

#include "srbf/types.hpp"

#include <vector>

namespace srbf {

/// Regularized Eikonal |grad u|^2 - eps lap u = 1 on [-1, 1]^2, u = 0 on the
/// boundary. Substituting u = -eps log v gives the linear problem
/// eps^2 lap v = v, v = 1 on the boundary, solved by the 5-point stencil and a
/// sine transform on `intervals` cells per axis. Values in between grid nodes
/// are bilinear.
class EikonalReference {
public:
    explicit EikonalReference(double eps, int intervals = 2000);

    double operator()(const Point& x) const;
    double eps() const { return eps_; }
    int intervals() const { return n_; }
    /// u at grid node (i, j), 0 <= i, j <= intervals.
    double node(int i, int j) const { return u_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }

private:
    double eps_;
    int n_;
    double h_;
    std::vector<double> u_;
};

/// Viscosity limit dist(x, boundary) = 1 - max(|x_1|, |x_2|).
double eikonal_viscosity_limit(const Point& x);

/// Exact viscous Burgers solution on [-1, 1] with u(0, x) = -sin(pi x) and
/// u(t, +-1) = 0 by the Cole-Hopf transformation, integrated with the
/// trapezoid rule in log-sum-exp form.
class BurgersExact {
public:
    explicit BurgersExact(double nu);

    double operator()(double t, double x) const;
    double nu() const { return nu_; }

private:
    double nu_;
    std::vector<double> z_;
};

}  // namespace srbf
