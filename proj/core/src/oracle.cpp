#include "sing/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "sing/errors.hpp"

namespace sing {

GaussianDensity::GaussianDensity(Vector mean, Matrix covariance) : mean_(std::move(mean)) {
    if (covariance.rows != mean_.size())
        throw DimensionMismatch("GaussianDensity: mean/covariance mismatch");
    chol_ = cholesky_factor(covariance);
    log_norm_ = -0.5 * double(mean_.size()) * std::log(2.0 * M_PI) - 0.5 * chol_.log_det();
}

double GaussianDensity::log_density(const Vector& z) const {
    Vector centered(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) centered[i] = z[i] - mean_[i];
    const Vector y = chol_.forward(centered);  // solves L y = (z - m)
    return log_norm_ - 0.5 * dot(y, y);
}

void GaussianDensity::sample(RandomEngine& eng, Vector& out) const {
    const std::size_t d = mean_.size();
    out.resize(d);
    Vector xi(d);
    for (std::size_t i = 0; i < d; ++i) xi[i] = eng.normal();
    for (std::size_t i = 0; i < d; ++i) {
        double s = mean_[i];
        for (std::size_t k = 0; k <= i; ++k) s += chol_.lower(i, k) * xi[k];
        out[i] = s;
    }
}

ScoreMatrix gaussian_score(const Matrix& precision) {
    if (precision.rows != precision.cols)
        throw DimensionMismatch("gaussian_score: precision must be square");
    if (!is_symmetric(precision, 1e-10))
        throw std::invalid_argument("gaussian_score: precision not symmetric");
    ScoreMatrix score;
    score.d = static_cast<int>(precision.rows);
    score.omega = Matrix(score.d, score.d);
    score.variance = Matrix(score.d, score.d);
    for (int i = 0; i < score.d; ++i)
        for (int j = 0; j < score.d; ++j)
            if (i != j) score.omega(i, j) = precision(i, j) * precision(i, j);
    return score;
}

double gaussian_log_sobolev_constant(const Matrix& covariance) {
    cholesky(covariance);  // SPD check; throws NotPositiveDefinite
    const std::size_t d = covariance.rows;
    Vector v(d, 1.0 / std::sqrt(double(d)));
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Vector w = matvec(covariance, v);
        const double norm = norm2(w);
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
        const double next = dot(v, matvec(covariance, v));
        if (std::abs(next - lambda) < 1e-10 * std::max(1.0, std::abs(next))) return next;
        lambda = next;
    }
    return lambda;
}

namespace {

// Least-squares regression of the target coordinate on the given regressors;
// returns intercept + slopes and the residual standard deviation. Used to
// match the inner importance-sampling proposals to empirical conditional
// moments.
struct Regression {
    Vector coef;      // intercept first, then one slope per regressor
    double resid_std = 1.0;
    std::vector<int> regressors;  // 0-based coordinate ids

    double predict(const Vector& z) const {
        double v = coef[0];
        for (std::size_t r = 0; r < regressors.size(); ++r) v += coef[r + 1] * z[regressors[r]];
        return v;
    }
};

Regression fit_regression(const std::vector<Vector>& rows, int target,
                          const std::vector<int>& regressors) {
    const std::size_t n = rows.size();
    const std::size_t q = regressors.size() + 1;
    Matrix xtx(q, q);
    Vector xty(q, 0.0);
    Vector x(q);
    for (const auto& row : rows) {
        x[0] = 1.0;
        for (std::size_t r = 0; r < regressors.size(); ++r) x[r + 1] = row[regressors[r]];
        const double y = row[target];
        for (std::size_t a = 0; a < q; ++a) {
            xty[a] += x[a] * y;
            for (std::size_t b = a; b < q; ++b) xtx(a, b) += x[a] * x[b];
        }
    }
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
    for (std::size_t a = 0; a < q; ++a) xtx(a, a) += 1e-9 * xtx(a, a) + 1e-12;

    Regression reg;
    reg.regressors = regressors;
    reg.coef = solve_spd(xtx, xty);
    double rss = 0.0;
    for (const auto& row : rows) {
        const double e = row[target] - reg.predict(row);
        rss += e * e;
    }
    reg.resid_std = std::sqrt(rss / double(n));
    if (!(reg.resid_std > 1e-12)) reg.resid_std = 1e-12;
    return reg;
}

double log_normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

double logsumexp(const Vector& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

CmiEstimate nested_mc_cmi(const JointDensity& density, int i, int j, std::size_t outer_n,
                          std::size_t inner_n, RngStream rng) {
    const int d = density.dim();
    if (i == j || i < 1 || j < 1 || i > d || j > d)
        throw std::invalid_argument("nested_mc_cmi: bad variable pair");
    if (outer_n < 2 || inner_n < 1)
        throw std::invalid_argument("nested_mc_cmi: need outer_n >= 2 and inner_n >= 1");
    const int ci = i - 1, cj = j - 1;

    // Calibration draws for the proposal moments.
    RandomEngine cal_eng(rng.substream(1));
    std::vector<Vector> cal(2048);
    for (auto& row : cal) density.sample(cal_eng, row);

    std::vector<int> rest, others_i, others_j;
    for (int v = 0; v < d; ++v) {
        if (v != ci && v != cj) rest.push_back(v);
        if (v != ci) others_i.push_back(v);
        if (v != cj) others_j.push_back(v);
    }
    // Conditionals given all remaining coordinates (for the single integrals)
    // and given only the rest (for the double integral).
    const Regression reg_j_all = fit_regression(cal, cj, others_j);
    const Regression reg_i_all = fit_regression(cal, ci, others_i);
    const Regression reg_i_rest = fit_regression(cal, ci, rest);
    const Regression reg_j_rest = fit_regression(cal, cj, rest);
    const double infl_single = 1.25, infl_double = 1.5;

    RandomEngine eng(rng);
    Vector z(d), zwork(d), terms;
    Vector lw(inner_n);
    terms.reserve(outer_n);
    double sum = 0.0, sumsq = 0.0;

    for (std::size_t o = 0; o < outer_n; ++o) {
        density.sample(eng, z);
        const double log_joint = density.log_density(z);

        // log M_i = log int pi dz_j at fixed others.
        zwork = z;
        {
            const double mean = reg_j_all.predict(z);
            const double sd = reg_j_all.resid_std * infl_single;
            for (std::size_t s = 0; s < inner_n; ++s) {
                const double draw = mean + sd * eng.normal();
                zwork[cj] = draw;
                lw[s] = density.log_density(zwork) - log_normal_pdf(draw, mean, sd);
            }
            zwork[cj] = z[cj];
        }
        const double log_mi = logsumexp(lw) - std::log(double(inner_n));

        // log M_j = log int pi dz_i.
        {
            const double mean = reg_i_all.predict(z);
            const double sd = reg_i_all.resid_std * infl_single;
            for (std::size_t s = 0; s < inner_n; ++s) {
                const double draw = mean + sd * eng.normal();
                zwork[ci] = draw;
                lw[s] = density.log_density(zwork) - log_normal_pdf(draw, mean, sd);
            }
            zwork[ci] = z[ci];
        }
        const double log_mj = logsumexp(lw) - std::log(double(inner_n));

        // log Z = log int int pi dz_i dz_j; exactly zero when nothing is
        // conditioned on (the density is normalized).
        double log_z = 0.0;
        if (!rest.empty()) {
            const double mi = reg_i_rest.predict(z), si = reg_i_rest.resid_std * infl_double;
            const double mj = reg_j_rest.predict(z), sj = reg_j_rest.resid_std * infl_double;
            for (std::size_t s = 0; s < inner_n; ++s) {
                const double di = mi + si * eng.normal();
                const double dj = mj + sj * eng.normal();
                zwork[ci] = di;
                zwork[cj] = dj;
                lw[s] = density.log_density(zwork) - log_normal_pdf(di, mi, si) -
                        log_normal_pdf(dj, mj, sj);
            }
            zwork[ci] = z[ci];
            zwork[cj] = z[cj];
            log_z = logsumexp(lw) - std::log(double(inner_n));
        }

        const double term = log_joint + log_z - log_mi - log_mj;
        sum += term;
        sumsq += term * term;
    }

    CmiEstimate est;
    est.outer_n = outer_n;
    est.inner_n = inner_n;
    est.value = sum / double(outer_n);
    const double var = std::max(0.0, sumsq / double(outer_n) - est.value * est.value);
    est.std_error = std::sqrt(var / double(outer_n));
    return est;
}

InformationBoundCheck check_information_bound(double rho) {
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("check_information_bound: |rho| < 1");
    InformationBoundCheck out;
    out.cmi = -0.5 * std::log(1.0 - rho * rho);
    const double omega = (rho / (1.0 - rho * rho)) * (rho / (1.0 - rho * rho));
    const double c0 = 1.0 + std::abs(rho);  // lambda_max of the unit-diagonal 2x2 covariance
    out.bound = c0 * c0 * omega;
    out.holds = out.cmi <= out.bound + 1e-15;
    return out;
}

std::string cmi_to_json(const CmiEstimate& est) {
    nlohmann::json j;
    j["value"] = est.value;
    j["outer_n"] = est.outer_n;
    j["inner_n"] = est.inner_n;
    j["std_error"] = est.std_error;
    return j.dump(2);
}

std::string information_bound_to_json(const InformationBoundCheck& check) {
    nlohmann::json j;
    j["cmi"] = check.cmi;
    j["bound"] = check.bound;
    j["holds"] = check.holds;
    return j.dump(2);
}

}  // namespace sing
