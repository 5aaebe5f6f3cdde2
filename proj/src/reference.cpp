#include "srbf/reference.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace srbf {

EikonalReference::EikonalReference(double eps, int intervals) : eps_(eps), n_(intervals) {
    if (!(eps > 0.0)) throw UsageError("Eikonal reference needs eps > 0");
    if (intervals < 4) throw UsageError("Eikonal reference needs at least 4 intervals");
    h_ = 2.0 / n_;
    const int m = n_ - 1;  // interior nodes per axis
    const auto um = static_cast<std::size_t>(m);
    const double pi = std::numbers::pi;

    // v = v1 + v1^T, where v1 solves eps^2 lap_h v1 = v1 with v1 = 1 on x = +-1 and
    // 0 on y = +-1. Expanding v1 in discrete sine modes along y leaves
    // cosh(mu_k x) / cosh(mu_k) along x. Every term is positive and decaying, so
    // exponentially small v keeps its relative precision, unlike solving for v - 1.
    std::vector<double> mu(um), b(um, 0.0);
    for (int k = 1; k <= m; ++k) {
        const double s = std::sin(pi * k / (2.0 * n_));
        mu[k - 1] = std::acosh(1.0 + h_ * h_ / (2.0 * eps * eps) + 2.0 * s * s) / h_;
        if (k % 2 == 1) b[k - 1] = 2.0 / n_ / std::tan(pi * k / (2.0 * n_));
    }

    // Row i holds the mode amplitudes divided by the k = 1 decay exp(mu_1 (|x_i| - 1)).
    double* buf = fftw_alloc_real(um * um);
    std::vector<double> log_scale(um);
    for (int i = 0; i < m; ++i) {
        const double ax = std::abs(-1.0 + (i + 1) * h_);
        log_scale[i] = mu[0] * (ax - 1.0);
        for (int k = 0; k < m; ++k) {
            const double c = std::exp((mu[k] - mu[0]) * (ax - 1.0)) *
                             (1.0 + std::exp(-2.0 * mu[k] * ax)) / (1.0 + std::exp(-2.0 * mu[k]));
            buf[static_cast<std::size_t>(i) * um + k] = 0.5 * b[k] * c;  // RODFT00 doubles
        }
    }
    const int len = m;
    fftw_plan plan = fftw_plan_many_r2r(1, &len, m, buf, nullptr, 1, m, buf, nullptr, 1, m,
                                        std::array<fftw_r2r_kind, 1>{FFTW_RODFT00}.data(),
                                        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    auto log_v1 = [&](int i, int j) {
        const double v = buf[static_cast<std::size_t>(i) * um + j];
        return std::log(std::max(v, std::numeric_limits<double>::min())) + log_scale[i];
    };
    u_.assign(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double a = log_v1(i, j);
            const double c = log_v1(j, i);
            const double hi = std::max(a, c);
            const double log_v = hi + std::log1p(std::exp(std::min(a, c) - hi));
            u_[static_cast<std::size_t>(i + 1) * (n_ + 1) + (j + 1)] = -eps * log_v;
        }
    fftw_free(buf);
}

double EikonalReference::operator()(const Point& x) const {
    if (x.size() != 2) throw UsageError("Eikonal reference is two-dimensional");
    const double fx = std::clamp((x[0] + 1.0) / h_, 0.0, static_cast<double>(n_));
    const double fy = std::clamp((x[1] + 1.0) / h_, 0.0, static_cast<double>(n_));
    const int i = std::min(static_cast<int>(fx), n_ - 1);
    const int j = std::min(static_cast<int>(fy), n_ - 1);
    const double s = fx - i;
    const double t = fy - j;
    return (1 - s) * (1 - t) * node(i, j) + s * (1 - t) * node(i + 1, j) +
           (1 - s) * t * node(i, j + 1) + s * t * node(i + 1, j + 1);
}

double eikonal_viscosity_limit(const Point& x) {
    return 1.0 - std::max(std::abs(x[0]), std::abs(x[1]));
}

BurgersExact::BurgersExact(double nu) : nu_(nu) {
    if (!(nu > 0.0)) throw UsageError("Burgers viscosity must be positive");
    constexpr double zmax = 14.0;
    constexpr double dz = 0.005;
    const int n = static_cast<int>(std::lround(2.0 * zmax / dz));
    z_.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) z_.push_back(-zmax + i * dz);
}

double BurgersExact::operator()(double t, double x) const {
    const double pi = std::numbers::pi;
    if (t <= 0.0) return -std::sin(pi * x);
    const double spread = std::sqrt(4.0 * nu_ * t);
    const double k = 1.0 / (2.0 * pi * nu_);

    double peak = -std::numeric_limits<double>::infinity();
    for (double z : z_) peak = std::max(peak, -std::cos(pi * (x - spread * z)) * k - z * z);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < z_.size(); ++i) {
        const double y = x - spread * z_[i];
        const double trap = (i == 0 || i + 1 == z_.size()) ? 0.5 : 1.0;
        const double e = trap * std::exp(-std::cos(pi * y) * k - z_[i] * z_[i] - peak);
        num += std::sin(pi * y) * e;
        den += e;
    }
    return -num / den;
}

}  // namespace srbf
