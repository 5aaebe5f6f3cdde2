#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace srbf {

/// Largest ambient dimension supported by the stack-allocated point types.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Point = Vec;

using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;

/// Malformed input: dimension mismatch, bad config value, missing file.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A valid request that the chosen problem/boundary treatment cannot serve.
class UnsupportedConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown inside the optimizer (e.g. singular Newton system).
class SolverFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box [lo, hi].
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }

    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
        return v;
    }

    /// Total facet measure; for d = 1 this is the point count 2.
    double boundary_measure() const {
        const int d = dim();
        if (d == 1) return 2.0;
        double total = 0.0;
        for (int i = 0; i < d; ++i) {
            double facet = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != i) facet *= hi[j] - lo[j];
            total += 2.0 * facet;
        }
        return total;
    }

    Box scaled(double factor) const {
        const Vec center = 0.5 * (lo + hi);
        const Vec half = 0.5 * factor * (hi - lo);
        return Box{center - half, center + half};
    }

    static Box cube(int d, double lo, double hi) {
        return Box{Vec::Constant(d, lo), Vec::Constant(d, hi)};
    }
};

}  // namespace srbf
