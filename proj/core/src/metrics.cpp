#include "sing/metrics.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "sing/errors.hpp"

namespace sing {

namespace {

// Regularized incomplete beta via the Lentz continued fraction.
double betacf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - lbeta) * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int df) {
    const double x = double(df) / (double(df) + t * t);
    const double tail = 0.5 * incbeta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double normal_quantile_0975() { return 1.959963984540054; }

double solve_t_quantile(double prob, int df) {
    double lo = 0.0, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

constexpr int kMaxTabulatedDf = 200;

}  // namespace

double student_t_quantile(double prob, int df) {
    if (df < 1) throw std::invalid_argument("student_t_quantile: df must be >= 1");
    if (!(prob > 0.5 && prob < 1.0))
        throw std::invalid_argument("student_t_quantile: prob must lie in (0.5, 1)");
    // The 0.975 column is what the intervals use; tabulate it once.
    if (prob == 0.975) {
        static std::array<double, kMaxTabulatedDf + 1> table{};
        static std::once_flag built;
        std::call_once(built, [] {
            for (int v = 1; v <= kMaxTabulatedDf; ++v) table[v] = solve_t_quantile(0.975, v);
        });
        if (df <= kMaxTabulatedDf) return table[df];
        return normal_quantile_0975();
    }
    if (df > kMaxTabulatedDf) {
        // Normal approximation via the symmetric quantile search on a huge df.
        return solve_t_quantile(prob, kMaxTabulatedDf);
    }
    return solve_t_quantile(prob, df);
}

std::pair<double, double> mean_ci(const ErrorSeries& series, double level) {
    const std::size_t n = series.values.size();
    if (n < 2) throw InsufficientData("mean_ci: need at least 2 values");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("mean_ci: bad level");
    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : series.values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / double(n - 1));
    const double q = student_t_quantile(0.5 * (1.0 + level), static_cast<int>(n - 1));
    return {mean, q * sd / std::sqrt(double(n))};
}

}  // namespace sing
