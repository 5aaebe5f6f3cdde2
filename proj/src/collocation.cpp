#include "srbf/collocation.hpp"

#include <cmath>
#include <random>

namespace srbf {

namespace {

bool strictly_inside(const Point& x, const Box& b, double tol) {
    for (int i = 0; i < b.dim(); ++i)
        if (x[i] <= b.lo[i] + tol || x[i] >= b.hi[i] - tol) return false;
    return true;
}

void fill_uniform_weights(CollocationSet& s) {
    if (!s.interior.empty())
        s.interior_weights.assign(s.interior.size(), s.domain.volume() / s.interior.size());
    if (!s.boundary.empty())
        s.boundary_weights.assign(s.boundary.size(),
                                  s.domain.boundary_measure() / s.boundary.size());
}

}  // namespace

CollocationSet make_grid(int n_per_dim, const Box& domain, double lambda) {
    if (n_per_dim < 3) throw UsageError("grid collocation needs at least 3 nodes per axis");
    const int d = domain.dim();
    if (d < 1 || d > kMaxDim) throw UsageError("unsupported dimension " + std::to_string(d));

    CollocationSet s;
    s.lambda = lambda;
    s.domain = domain;
    s.candidate_box = domain.scaled(2.0);

    std::vector<int> idx(d, 0);
    const double tol = 1e-12;
    while (true) {
        Point x(d);
        for (int i = 0; i < d; ++i)
            x[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * idx[i] / (n_per_dim - 1);
        if (strictly_inside(x, domain, tol))
            s.interior.push_back(x);
        else
            s.boundary.push_back(x);

        int axis = d - 1;
        while (axis >= 0 && ++idx[axis] == n_per_dim) idx[axis--] = 0;
        if (axis < 0) break;
    }
    fill_uniform_weights(s);
    return s;
}

CollocationSet make_random(std::size_t k1, std::size_t k2, const Box& domain, double lambda,
                           std::uint64_t seed) {
    if (k1 < 1 || k2 < 1) throw UsageError("random collocation needs k1, k2 >= 1");
    const int d = domain.dim();
    CollocationSet s;
    s.lambda = lambda;
    s.domain = domain;
    s.candidate_box = domain.scaled(2.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    s.interior.reserve(k1);
    while (s.interior.size() < k1) {
        Point x(d);
        for (int i = 0; i < d; ++i)
            x[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * unit(rng);
        if (strictly_inside(x, domain, 0.0)) s.interior.push_back(x);
    }

    // Facet f = 2*axis + side; measure of each facet is the product of the other extents.
    std::vector<double> facet_measure(2 * d);
    for (int axis = 0; axis < d; ++axis) {
        double m = 1.0;
        for (int j = 0; j < d; ++j)
            if (j != axis) m *= domain.hi[j] - domain.lo[j];
        facet_measure[2 * axis] = facet_measure[2 * axis + 1] = m;
    }
    std::discrete_distribution<int> pick_facet(facet_measure.begin(), facet_measure.end());

    s.boundary.reserve(k2);
    for (std::size_t k = 0; k < k2; ++k) {
        const int facet = pick_facet(rng);
        const int axis = facet / 2;
        Point x(d);
        for (int i = 0; i < d; ++i)
            x[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * unit(rng);
        x[axis] = (facet % 2 == 0) ? domain.lo[axis] : domain.hi[axis];
        s.boundary.push_back(x);
    }
    fill_uniform_weights(s);
    return s;
}

const Point& row_point(const CollocationSet& pts, const ResidualRow& row) {
    return row.kind == RowKind::Interior ? pts.interior[row.point] : pts.boundary[row.point];
}

WeightMatrix weight_matrix(const CollocationSet& pts, std::span<const ResidualRow> rows) {
    WeightMatrix w;
    w.diag.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& row = rows[k];
        w.diag[static_cast<Eigen::Index>(k)] =
            row.kind == RowKind::Interior ? pts.interior_weights[row.point]
                                          : pts.lambda * pts.boundary_weights[row.point];
    }
    return w;
}

std::vector<int> active_facets(const Point& x, const Box& domain, double tol) {
    std::vector<int> axes;
    for (int i = 0; i < domain.dim(); ++i)
        if (std::abs(x[i] - domain.lo[i]) <= tol || std::abs(x[i] - domain.hi[i]) <= tol)
            axes.push_back(i);
    return axes;
}

}  // namespace srbf
