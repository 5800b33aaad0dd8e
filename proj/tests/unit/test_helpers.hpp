#pragma once

// Shared fixtures for the unit suites: random SPD matrices, random monotone
// maps and second-order finite-difference oracles.

#include <cmath>
#include <functional>

#include "sing/matrix.hpp"
#include "sing/rng.hpp"
#include "sing/sample_matrix.hpp"
#include "sing/transport.hpp"

namespace testutil {

inline sing::Matrix random_spd(int d, sing::RandomEngine& eng, double ridge = 0.5) {
    sing::Matrix b(d, d);
    for (auto& v : b.data) v = eng.normal();
    sing::Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += b(k, i) * b(k, j);
            a(i, j) = s / d + (i == j ? ridge : 0.0);
        }
    return a;
}

// Random monotone triangular map: random sparsity, coefficients drawn small
// enough that the fit stays well-conditioned, h kept away from zero.
inline sing::TriangularMap random_map(int d, int degree, sing::RandomEngine& eng,
                                      double drop_prob = 0.3, int quad_order = 32) {
    sing::SparsityPattern pattern;
    for (int k = 2; k <= d; ++k)
        for (int j = 1; j < k; ++j)
            if (eng.uniform() < drop_prob) pattern.add(j, k);
    sing::TriangularMap map = sing::make_triangular_map(d, pattern, degree, quad_order);
    for (auto& mc : map.components) {
        for (auto& c : mc.c_coeffs) c = 0.4 * eng.normal();
        for (auto& h : mc.h_coeffs) h = 0.25 * eng.normal();
        mc.h_coeffs[0] = 1.0 + 0.3 * eng.uniform();
    }
    return map;
}

inline sing::Vector random_point(int d, sing::RandomEngine& eng, double scale = 1.0) {
    sing::Vector z(d);
    for (auto& v : z) v = scale * eng.normal();
    return z;
}

inline sing::SampleMatrix random_samples(std::size_t n, int d, sing::RandomEngine& eng) {
    sing::SampleMatrix m(n, d);
    for (auto& v : m.values) v = eng.normal();
    return m;
}

// Central second-order mixed difference of f in coordinates i and j (1-based).
inline double fd_mixed(const std::function<double(const sing::Vector&)>& f, sing::Vector z, int i,
                       int j, double h = 1e-4) {
    auto at = [&](double di, double dj) {
        sing::Vector x = z;
        x[i - 1] += di;
        x[j - 1] += dj;
        return f(x);
    };
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

inline double rel_err(double got, double want, double floor = 1e-10) {
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace testutil
