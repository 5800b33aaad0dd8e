#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sing/matrix.hpp"
#include "sing/sample_matrix.hpp"
#include "sing/transport.hpp"

namespace sing {

// Conditional-independence score estimates: omega(i,j) is the sample average
// of |d_i d_j log-pullback|^2, variance(i,j) the squared delta-method scale
// (upsilon^2). Both symmetric with unused diagonals; indices 1-based in the
// accessor helpers.
struct ScoreMatrix {
    int d = 0;
    Matrix omega;
    Matrix variance;
    std::size_t n = 0;

    double omega_at(int i, int j) const { return omega(i - 1, j - 1); }
    double variance_at(int i, int j) const { return variance(i - 1, j - 1); }
};

struct ThresholdedScore {
    ScoreMatrix base;
    Matrix tau;                             // per-entry thresholds
    std::vector<std::pair<int, int>> kept;  // canonical 1-based pairs with omega >= tau
    double f_constant = 1.0;                // c in f(n) = c sqrt(log n)
    double tau0 = 0.0;
};

// Omega estimates only (variance left zero).
ScoreMatrix estimate_score(const TriangularMap& map, const SampleMatrix& data);

// Omega plus delta-method variances: upsilon^2 = grad_alpha(Omega)' Gamma^{-1}
// grad_alpha(Omega) with the gradient assembled analytically and the ridged
// Fisher matrix factored once.
ScoreMatrix estimate_variances(const TriangularMap& map, const SampleMatrix& data,
                               const Matrix& fisher);

// Coefficient gradients of every omega entry: one row per pair (i, j), i < j,
// in lexicographic order, with the map's component-major coefficient layout.
Matrix score_gradients(const TriangularMap& map, const SampleMatrix& data);

// tau(i,j) = tau0 + c sqrt(log n) upsilon(i,j) / sqrt(n); kept edges are
// exactly those with omega >= tau.
ThresholdedScore threshold(const ScoreMatrix& score, double c, double tau0);

void write_matrix_csv(const std::string& path, const Matrix& m);
std::string threshold_to_json(const ThresholdedScore& t);

}  // namespace sing
