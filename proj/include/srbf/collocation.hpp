#pragma once

#include "srbf/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace srbf {

/// Interior and boundary quadrature points of a box domain.
struct CollocationSet {
    std::vector<Point> interior;
    std::vector<double> interior_weights;
    std::vector<Point> boundary;
    std::vector<double> boundary_weights;
    double lambda = 1.0;
    Box domain;
    Box candidate_box;  // node centers are sampled here; defaults to domain scaled by 2

    int dim() const { return domain.dim(); }
    std::size_t k1() const { return interior.size(); }
    std::size_t k2() const { return boundary.size(); }
};

/// Tensor grid with n_per_dim nodes per axis, boundary nodes included.
CollocationSet make_grid(int n_per_dim, const Box& domain, double lambda);

/// k1 uniform interior samples and k2 uniform boundary samples, facets drawn
/// proportionally to their measure. Deterministic in seed.
CollocationSet make_random(std::size_t k1, std::size_t k2, const Box& domain, double lambda,
                           std::uint64_t seed);

enum class RowKind { Interior, BoundaryValue, BoundaryTangent };

/// One scalar residual row of the empirical loss. `point` indexes
/// CollocationSet::interior for Interior rows and ::boundary otherwise.
struct ResidualRow {
    RowKind kind = RowKind::Interior;
    std::size_t point = 0;
    Vec tangent;  // unit facet direction, BoundaryTangent rows only
};

struct WeightMatrix {
    VectorX diag;
};

/// w_{1,k} for interior rows, lambda * w_{2,k} for every boundary row (value or
/// tangential) of boundary point k.
WeightMatrix weight_matrix(const CollocationSet& pts, std::span<const ResidualRow> rows);

const Point& row_point(const CollocationSet& pts, const ResidualRow& row);

/// Axes along which a boundary point sits on a facet (coordinate equal to lo or hi).
std::vector<int> active_facets(const Point& x, const Box& domain, double tol = 1e-12);

}  // namespace srbf
