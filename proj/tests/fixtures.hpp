#pragma once

#include "srbf/network.hpp"

#include <random>

namespace srbf::testing {

/// Random network with centers in [-1, 1]^d and moderate bandwidths.
inline RbfNetwork random_network(int dim, std::size_t nodes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    RbfNetwork net = RbfNetwork::empty(dim);
    for (std::size_t n = 0; n < nodes; ++n) {
        KernelNode k;
        k.y = Vec(dim);
        for (int i = 0; i < dim; ++i) k.y[i] = unit(rng);
        k.s_var = -0.5 + 1.5 * unit(rng);
        k.c = unit(rng);
        k.q = k.c;
        net.nodes.push_back(k);
    }
    return net;
}

inline Point point(std::initializer_list<double> xs) {
    Point p(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) p[i++] = x;
    return p;
}

}  // namespace srbf::testing
