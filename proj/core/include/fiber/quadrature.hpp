#pragma once

#include <vector>

namespace fiber {

// Gauss-Legendre rule mapped to [0, 1]; nodes ascending.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Supported point counts: 2..10, 15, 20.
const QuadratureRule& gauss_legendre_unit(int points);

} // namespace fiber
