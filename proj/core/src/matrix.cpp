#include "sing/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sing/errors.hpp"

namespace sing {

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vector& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols != x.size()) throw DimensionMismatch("matvec: dimension mismatch");
    Vector y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

double symmetry_gap(const Matrix& a) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = i + 1; j < a.cols; ++j)
            gap = std::max(gap, std::abs(a(i, j) - a(j, i)));
    return gap;
}

bool is_symmetric(const Matrix& a, double tol) {
    return a.rows == a.cols && symmetry_gap(a) <= tol;
}

namespace {

void require_square_symmetric(const Matrix& a, const char* who) {
    if (a.rows != a.cols || a.rows == 0)
        throw DimensionMismatch(std::string(who) + ": matrix must be square and non-empty");
    if (symmetry_gap(a) > 1e-10)
        throw std::invalid_argument(std::string(who) + ": matrix not symmetric to 1e-10");
}

}  // namespace

Matrix cholesky(const Matrix& a) {
    require_square_symmetric(a, "cholesky");
    const std::size_t n = a.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    const double pivot_floor = 1e-12 * max_diag;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > pivot_floor) || max_diag <= 0.0)
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) +
                                      " at column " + std::to_string(j + 1));
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            const double* li = l.data.data() + i * n;
            const double* lj = l.data.data() + j * n;
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            l(i, j) = s / ljj;
        }
    }
    return l;
}

Vector CholeskyFactor::forward(const Vector& b) const {
    const std::size_t n = lower.rows;
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        const double* li = lower.data.data() + i * n;
        for (std::size_t k = 0; k < i; ++k) s -= li[k] * y[k];
        y[i] = s / li[i];
    }
    return y;
}

Vector CholeskyFactor::solve(const Vector& b) const {
    const std::size_t n = lower.rows;
    if (b.size() != n) throw DimensionMismatch("CholeskyFactor::solve: rhs dimension mismatch");
    Vector y = forward(b);
    // Back substitution with L^T.
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * y[k];
        y[ii] = s / lower(ii, ii);
    }
    return y;
}

double CholeskyFactor::log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lower.rows; ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

CholeskyFactor cholesky_factor(const Matrix& a) { return CholeskyFactor{cholesky(a)}; }

Vector solve_spd(const Matrix& a, const Vector& b) {
    if (a.rows != b.size()) throw DimensionMismatch("solve_spd: rhs dimension mismatch");
    return cholesky_factor(a).solve(b);
}

Matrix invert_lower_triangular(const Matrix& l) {
    const std::size_t n = l.rows;
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s += l(i, k) * inv(k, j);
            inv(i, j) = -s / l(i, i);
        }
    }
    return inv;
}

Matrix inverse_spd(const Matrix& a) {
    const std::size_t n = a.rows;
    CholeskyFactor f = cholesky_factor(a);
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vector x = f.solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
        e[j] = 0.0;
    }
    // Symmetrize against round-off.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

}  // namespace sing
