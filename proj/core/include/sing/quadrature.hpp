#pragma once

#include <vector>

namespace sing {

enum class QuadratureKind { gauss_legendre, gauss_hermite };

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadratureKind kind = QuadratureKind::gauss_legendre;
};

// Gauss-Legendre rule on [-1, 1], exact for polynomials up to degree 2*order - 1.
// Nodes are found by Newton iteration on the Legendre polynomial to 1e-14.
QuadratureRule gauss_legendre(int order);

// Gauss-Hermite rule for weight exp(-x^2) on the real line, exact up to
// degree 2*order - 1. Used for the Gaussian-weighted integrals in the
// nonparanormal marginal transforms.
QuadratureRule gauss_hermite(int order);

}  // namespace sing
