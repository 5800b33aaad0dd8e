#pragma once

#include <cstddef>
#include <vector>

namespace sing {

using Vector = std::vector<double>;

// Dense row-major matrix. Dimensions here stay small (d up to a few hundred,
// coefficient counts up to a few thousand), so no sparse storage.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm_inf(const Vector& a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);

// Max |a(i,j) - a(j,i)| over all pairs.
double symmetry_gap(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol = 1e-10);

// Cholesky factor L (lower triangular) with L L^T = a.
// Throws NotPositiveDefinite when a pivot falls below 1e-12 times the largest
// diagonal entry, which flags singular empirical covariances (n < d) explicitly.
Matrix cholesky(const Matrix& a);

// Factor-once interface for repeated solves against the same SPD matrix.
struct CholeskyFactor {
    Matrix lower;

    Vector solve(const Vector& b) const;
    // Solves L y = b only (forward substitution).
    Vector forward(const Vector& b) const;
    double log_det() const;  // log det of the factored matrix a = L L^T
};

CholeskyFactor cholesky_factor(const Matrix& a);

// Solves a x = b for SPD a.
Vector solve_spd(const Matrix& a, const Vector& b);

// Inverse of a lower-triangular matrix (unchecked beyond zero diagonal).
Matrix invert_lower_triangular(const Matrix& l);

Matrix inverse_spd(const Matrix& a);

}  // namespace sing
