#include "srbf/kernel.hpp"

#include <cmath>
#include <numbers>

namespace srbf {

namespace {

void check_dims(const Point& x, const Vec& y) {
    if (x.size() != y.size())
        throw UsageError("feature evaluation: point has dimension " + std::to_string(x.size()) +
                         " but center has dimension " + std::to_string(y.size()));
}

// sigma^(s-d) / (2 pi)^(d/2)
double amplitude(double sigma, double s_exp, int d) {
    return std::pow(sigma, s_exp - d) * std::pow(2.0 * std::numbers::pi, -0.5 * d);
}

}  // namespace

SigmaValue sigma_reparam(double s_var, SigmaBounds bounds) {
    const double span = bounds.max - bounds.min;
    double tau;
    if (s_var >= 0.0) {
        tau = 1.0 / (1.0 + std::exp(-s_var));
    } else {
        const double e = std::exp(s_var);
        tau = e / (1.0 + e);
    }
    return {bounds.min + span * tau, span * tau * (1.0 - tau)};
}

double sigma_to_svar(double sigma, SigmaBounds bounds) {
    const double t = (sigma - bounds.min) / (bounds.max - bounds.min);
    if (!(t > 0.0 && t < 1.0))
        throw UsageError("sigma " + std::to_string(sigma) + " outside the open bandwidth interval");
    return std::log(t) - std::log1p(-t);
}

double eval_feature(const Point& x, const FeatureParams& p) {
    check_dims(x, p.y);
    const double sigma = sigma_reparam(p.s_var, p.sigma_bounds).sigma;
    const double rho2 = (x - p.y).squaredNorm();
    return amplitude(sigma, p.s_exp, p.dim()) * std::exp(-rho2 / (2.0 * sigma * sigma));
}

FeatureJet feature_jet(const Point& x, const FeatureParams& p) {
    check_dims(x, p.y);
    const int d = p.dim();
    const auto [sigma, dsigma_ds] = sigma_reparam(p.s_var, p.sigma_bounds);
    const Vec r = x - p.y;
    const double rho2 = r.squaredNorm();
    const double s2 = sigma * sigma;
    const double phi = amplitude(sigma, p.s_exp, d) * std::exp(-rho2 / (2.0 * s2));

    const Mat I = Mat::Identity(d, d);
    const Mat rrT = r * r.transpose();

    FeatureJet j;
    j.value = phi;
    j.grad_x = -(phi / s2) * r;
    j.hess_x = phi * (rrT / (s2 * s2) - I / s2);
    j.grad_y = -j.grad_x;

    // d phi / d sigma = kappa * phi
    const double kappa = (p.s_exp - d) / sigma + rho2 / (s2 * sigma);
    j.grad_sigma.value = kappa * phi;
    j.grad_sigma.grad = (2.0 * phi / (s2 * sigma)) * r + kappa * j.grad_x;
    j.grad_sigma.hess = phi * (-4.0 * rrT / (s2 * s2 * sigma) + 2.0 * I / (s2 * sigma)) +
                        kappa * j.hess_x;

    j.grad_svar.value = dsigma_ds * j.grad_sigma.value;
    j.grad_svar.grad = dsigma_ds * j.grad_sigma.grad;
    j.grad_svar.hess = dsigma_ds * j.grad_sigma.hess;
    return j;
}

ContractedFeature contract_feature(const JetFunctional& f, const Point& x, const Vec& y,
                                   double sigma, double s_exp, bool with_derivatives) {
    check_dims(x, y);
    const int d = static_cast<int>(y.size());
    const Vec r = x - y;
    const double rho2 = r.squaredNorm();
    const double s2 = sigma * sigma;
    const double s4 = s2 * s2;
    const double phi = amplitude(sigma, s_exp, d) * std::exp(-rho2 / (2.0 * s2));

    const Vec Hr = f.H * r;
    const double gr = f.g.dot(r);
    const double rHr = r.dot(Hr);
    const double trH = f.H.trace();
    const double Q = f.a - gr / s2 + rHr / s4 - trH / s2;

    ContractedFeature out;
    out.value = phi * Q;
    if (!with_derivatives) return out;

    out.d_y = phi * ((Q / s2) * r + f.g / s2 - (2.0 / s4) * Hr);
    const double kappa = (s_exp - d) / sigma + rho2 / (s2 * sigma);
    out.d_sigma = phi * (kappa * Q + 2.0 * gr / (s2 * sigma) - 4.0 * rHr / (s4 * sigma) +
                         2.0 * trH / (s2 * sigma));
    return out;
}

}  // namespace srbf
