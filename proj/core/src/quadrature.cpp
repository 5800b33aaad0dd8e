#include "sing/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sing {

namespace {

// Legendre P_n and its derivative at x via the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = p0;
        dp = 0.0;
        return;
    }
    for (int j = 1; j < n; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.kind = QuadratureKind::gauss_legendre;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);

    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton to 1e-14.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double p = 0.0, dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre(order, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-14) break;
        }
        legendre(order, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

namespace {

// Orthonormal Hermite polynomials for weight exp(-x^2); the normalized
// recurrence keeps values bounded up to order ~few hundred.
void hermite_orthonormal(int n, double x, double& p, double& dp) {
    double p0 = 0.0;
    double p1 = 0.7511255444649425;  // pi^{-1/4}
    for (int j = 0; j < n; ++j) {
        const double p2 =
            x * std::sqrt(2.0 / (j + 1.0)) * p1 - std::sqrt(double(j) / (j + 1.0)) * p0;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = std::sqrt(2.0 * n) * p0;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    QuadratureRule rule;
    rule.kind = QuadratureKind::gauss_hermite;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);

    const int half = (order + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        // March inward from the largest root using the classical guesses; z
        // still holds the previously found root.
        if (i == 0) {
            z = std::sqrt(2.0 * order + 1.0) - 1.85575 * std::pow(2.0 * order + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(double(order), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double p = 0.0, dp = 1.0;
        for (int iter = 0; iter < 200; ++iter) {
            hermite_orthonormal(order, z, p, dp);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-14) break;
        }
        hermite_orthonormal(order, z, p, dp);
        rule.nodes[i] = z;
        rule.nodes[order - 1 - i] = -z;
        const double w = 2.0 / (dp * dp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

}  // namespace sing
