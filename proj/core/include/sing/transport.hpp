#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sing/basis.hpp"
#include "sing/matrix.hpp"

namespace sing {

// Pairs (j, k) with j < k meaning component k does not depend on variable j.
// Indices are 1-based throughout.
struct SparsityPattern {
    std::set<std::pair<int, int>> pairs;

    void add(int j, int k);
    bool contains(int j, int k) const { return pairs.count({j, k}) > 0; }
    std::size_t size() const { return pairs.size(); }
    bool operator==(const SparsityPattern& o) const { return pairs == o.pairs; }
};

// One monotone component S^k(z_1..z_k) = c_k(z_1..z_{k-1}) + int_0^{z_k} g(h_k(z_1..z_{k-1}, t)) dt
// with g(x) = x^2 + epsilon. c uses basis functions up to the map degree, h one
// degree less since it is integrated once.
struct MapComponent {
    int index = 1;       // k, 1-based
    BasisSet c_basis;    // active variables in 1..k-1
    BasisSet h_basis;    // active variables in 1..k, always including k
    Vector c_coeffs;
    Vector h_coeffs;

    std::size_t coefficient_count() const { return c_coeffs.size() + h_coeffs.size(); }
};

struct TriangularMap {
    int dimension = 0;
    std::vector<MapComponent> components;
    SparsityPattern sparsity;
    int quadrature_order = 32;
    double epsilon = 1e-8;

    std::size_t coefficient_count() const;
};

// Map with bases built from the sparsity pattern: component k is active on
// {j < k : (j,k) not in pattern}. Coefficients start at the identity-like map
// (c = 0, h = 1), which is the optimizer's initial iterate.
TriangularMap make_triangular_map(int d, const SparsityPattern& pattern, int degree,
                                  int quadrature_order = 32, double epsilon = 1e-8);

// S(z) = z as a degree-1 map.
TriangularMap make_identity_map(int d, int quadrature_order = 32, double epsilon = 1e-8);

// S(z) = L (z - shift) for lower-triangular L with positive diagonal.
TriangularMap make_affine_map(const Matrix& lower, const Vector& shift, int quadrature_order = 32,
                              double epsilon = 1e-8);

// Flattened coefficients, component-major, c before h within a component.
Vector get_coefficients(const TriangularMap& map);
void set_coefficients(TriangularMap& map, const Vector& coeffs);

// Component evaluation; the integral uses Gauss-Legendre rescaled to [0, z_k].
double eval_component(const MapComponent& mc, const Vector& z, int quadrature_order,
                      double epsilon);

// d/dz_k of S^k, which is g(h_k(z_1..z_k)) = h_k^2 + epsilon > 0.
double partial_k(const MapComponent& mc, const Vector& z, double epsilon);

double eval_component(const TriangularMap& map, int k, const Vector& z);
double partial_k(const TriangularMap& map, int k, const Vector& z);
Vector eval_map(const TriangularMap& map, const Vector& z);

// log of the pullback of the standard Gaussian reference:
// sum_k [ -S^k(z)^2 / 2 + log d_k S^k(z) ] - (d/2) log(2 pi).
double log_pullback(const TriangularMap& map, const Vector& z);

// d_i d_j of log_pullback for i != j, assembled analytically from basis
// derivatives so it is exactly consistent with the discretized map.
double mixed_log_hessian(const TriangularMap& map, const Vector& z, int i, int j);

// Gradient of log_pullback with respect to all coefficients (component-major
// layout), differentiating the discretized integral.
Vector coeff_gradient_log_pullback(const TriangularMap& map, const Vector& z);

// Sequential univariate root solves; each component is monotone in its last
// input. Throws NoConvergence if a bracket cannot be found in 200 doublings.
Vector invert(const TriangularMap& map, const Vector& x);

std::string map_to_json(const TriangularMap& map);
TriangularMap map_from_json(const std::string& text);

}  // namespace sing
