#include "sing/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "sing/errors.hpp"
#include "sing/quadrature.hpp"

namespace sing {

std::string dataset_spec_to_json(const DatasetSpec& spec) {
    nlohmann::json j;
    j["family"] = spec.family;
    j["parameters"] = spec.parameters;
    j["truth"] = nlohmann::json::parse(graph_to_json(spec.truth));
    return j.dump(2);
}

Matrix chain_precision(int d, double coupling) {
    Matrix prec(d, d);
    for (int i = 0; i < d; ++i) {
        prec(i, i) = 1.0;
        if (i + 1 < d) {
            prec(i, i + 1) = coupling;
            prec(i + 1, i) = coupling;
        }
    }
    return prec;
}

namespace {

// x = L^{-T} xi has covariance (L L^T)^{-1} when L is the Cholesky factor of
// the precision matrix.
void sample_from_precision_chol(const Matrix& chol_prec, RandomEngine& eng, double* out) {
    const std::size_t d = chol_prec.rows;
    for (std::size_t i = 0; i < d; ++i) out[i] = eng.normal();
    for (std::size_t ii = d; ii-- > 0;) {
        double s = out[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= chol_prec(k, ii) * out[k];
        out[ii] = s / chol_prec(ii, ii);
    }
}

UndirectedGraph graph_from_precision(const Matrix& precision) {
    UndirectedGraph g(static_cast<int>(precision.rows));
    for (int i = 1; i <= g.d; ++i)
        for (int j = i + 1; j <= g.d; ++j)
            if (std::abs(precision(i - 1, j - 1)) > 1e-14) g.add_edge(i, j);
    return g;
}

}  // namespace

std::pair<SampleMatrix, UndirectedGraph> gen_gaussian(const Matrix& precision, std::size_t n,
                                                      RngStream rng) {
    const Matrix chol_prec = cholesky(precision);
    SampleMatrix out(n, precision.rows);
    RandomEngine eng(rng);
    for (std::size_t l = 0; l < n; ++l) sample_from_precision_chol(chol_prec, eng, out.row(l));
    return {std::move(out), graph_from_precision(precision)};
}

std::pair<SampleMatrix, UndirectedGraph> gen_butterfly(int r, std::size_t n, RngStream rng) {
    if (r < 1) throw std::invalid_argument("gen_butterfly: need r >= 1");
    SampleMatrix out(n, std::size_t(2) * r);
    RandomEngine eng(rng);
    for (std::size_t l = 0; l < n; ++l) {
        for (int i = 0; i < r; ++i) {
            const double p = eng.normal();
            const double w = eng.normal();
            out(l, 2 * i) = p;
            out(l, 2 * i + 1) = w * p;
        }
    }
    UndirectedGraph truth(2 * r);
    for (int i = 1; i <= r; ++i) truth.add_edge(2 * i - 1, 2 * i);
    return {std::move(out), truth};
}

NonparanormalModel gen_nonparanormal_graph(int d, double s, int max_degree, RngStream rng) {
    if (d < 2 || s <= 0.0) throw std::invalid_argument("gen_nonparanormal_graph: bad parameters");
    RandomEngine eng(rng);
    std::vector<double> y(std::size_t(d) * 2);
    for (int i = 0; i < d; ++i) {
        y[2 * i] = eng.uniform();
        y[2 * i + 1] = eng.uniform();
    }
    UndirectedGraph g(d);
    std::vector<int> degree(d, 0);
    const double scale = 1.0 / std::sqrt(2.0 * M_PI);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            // The acceptance probability decays with distance; the exponent is
            // negative so the value is a probability, clamped to [0, 1].
            const double prob = std::min(1.0, scale * std::exp(-(dx * dx + dy * dy) / (2.0 * s)));
            const double u = eng.uniform();
            if (u < prob && degree[i] < max_degree && degree[j] < max_degree) {
                g.add_edge(i + 1, j + 1);
                ++degree[i];
                ++degree[j];
            }
        }
    }
    NonparanormalModel model;
    model.truth = g;
    model.precision = Matrix(d, d);
    for (int i = 0; i < d; ++i) model.precision(i, i) = 1.0;
    for (const auto& [a, b] : g.edges) {
        model.precision(a - 1, b - 1) = 0.245;
        model.precision(b - 1, a - 1) = 0.245;
    }
    return model;
}

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

constexpr double kCdfMu = 0.05;
constexpr double kCdfSigma = 0.4;
constexpr int kTransformQuadOrder = 100;

double cdf_squash(double t) { return standard_normal_cdf((t - kCdfMu) / kCdfSigma); }

}  // namespace

CdfMarginalTransform::CdfMarginalTransform(double sigma, double mu) {
    sigma_ = sigma;
    mu_ = mu;
    standardize_arg_ = false;
    const QuadratureRule gh = gauss_hermite(kTransformQuadOrder);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double mean = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        mean += gh.weights[i] * cdf_squash(mu + std::sqrt(2.0) * sigma * gh.nodes[i]);
    mean *= inv_sqrt_pi;
    double var = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double f = cdf_squash(mu + std::sqrt(2.0) * sigma * gh.nodes[i]) - mean;
        var += gh.weights[i] * f * f;
    }
    var *= inv_sqrt_pi;
    mean_f0_ = mean;
    sqrt_var_f0_ = std::sqrt(var);
}

CdfMarginalTransform CdfMarginalTransform::standardized_argument(double sigma, double mu,
                                                                  double window_scale) {
    CdfMarginalTransform t;
    t.sigma_ = sigma;
    t.mu_ = mu;
    t.standardize_arg_ = true;
    t.window_scale_ = window_scale;
    const QuadratureRule gh = gauss_hermite(kTransformQuadOrder);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double mean = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        mean += gh.weights[i] * cdf_squash(std::sqrt(2.0) * gh.nodes[i] / window_scale);
    mean *= inv_sqrt_pi;
    double var = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double f = cdf_squash(std::sqrt(2.0) * gh.nodes[i] / window_scale) - mean;
        var += gh.weights[i] * f * f;
    }
    var *= inv_sqrt_pi;
    t.mean_f0_ = mean;
    t.sqrt_var_f0_ = std::sqrt(var);
    return t;
}

double CdfMarginalTransform::operator()(double x) const {
    const double arg = standardize_arg_ ? (x - mu_) / (sigma_ * window_scale_) : x;
    return sigma_ * (cdf_squash(arg) - mean_f0_) / sqrt_var_f0_ + mu_;
}

PowerMarginalTransform::PowerMarginalTransform(double a, double sigma) : sigma_(sigma), a_(a) {
    if (a <= 0.0) throw std::invalid_argument("PowerMarginalTransform: a must be positive");
    const QuadratureRule gh = gauss_hermite(kTransformQuadOrder);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double moment = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        moment += gh.weights[i] * std::pow(std::abs(std::sqrt(2.0) * sigma * gh.nodes[i]), 2.0 * a);
    moment *= inv_sqrt_pi;
    sqrt_moment_ = std::sqrt(moment);
}

double PowerMarginalTransform::operator()(double x) const {
    const double f = (x >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), a_);
    return sigma_ * f / sqrt_moment_;
}

double cdf_transform_inverse(double x, int, double sigma_kk) {
    return CdfMarginalTransform(std::sqrt(sigma_kk))(x);
}

double power_transform_inverse(double x, int, double a, double sigma_kk) {
    return PowerMarginalTransform(a, std::sqrt(sigma_kk))(x);
}

SampleMatrix sample_nonparanormal(const NonparanormalModel& model, std::size_t n,
                                  MarginalTransformKind kind, double power_a, RngStream rng) {
    const int d = model.truth.d;
    const Matrix cov = inverse_spd(model.precision);
    const Matrix chol_prec = cholesky(model.precision);

    std::vector<CdfMarginalTransform> cdfs;
    std::vector<PowerMarginalTransform> powers;
    for (int k = 0; k < d; ++k) {
        const double sigma = std::sqrt(cov(k, k));
        if (kind == MarginalTransformKind::gaussian_cdf)
            cdfs.emplace_back(sigma);
        else
            powers.emplace_back(power_a, sigma);
    }

    SampleMatrix out(n, d);
    RandomEngine eng(rng);
    Vector x(d);
    for (std::size_t l = 0; l < n; ++l) {
        sample_from_precision_chol(chol_prec, eng, x.data());
        for (int k = 0; k < d; ++k)
            out(l, k) = kind == MarginalTransformKind::gaussian_cdf ? cdfs[k](x[k])
                                                                    : powers[k](x[k]);
    }
    return out;
}

Matrix cubic_base_covariance() { return inverse_spd(chain_precision(3, 0.2)); }

Matrix cubic_gaussian_approx_covariance() {
    const Matrix s = cubic_base_covariance();
    Matrix out(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double sij = s(i, j);
            out(i, j) = 9.0 * s(i, i) * s(j, j) * sij + 6.0 * sij * sij * sij;
        }
    return out;
}

CubicDataset gen_cubic(std::size_t n, RngStream rng) {
    CubicDataset out;
    const Matrix prec = chain_precision(3, 0.2);
    auto [samples, truth] = gen_gaussian(prec, n, rng);
    for (double& v : samples.values) v = v * v * v;
    out.samples = std::move(samples);
    out.truth = truth;
    out.gaussian_approx_precision = inverse_spd(cubic_gaussian_approx_covariance());
    return out;
}

Vector star_base_inverse(const Vector& y, double a, double b) {
    Vector x(y.size());
    x[0] = y[0] / a;
    for (std::size_t k = 1; k < y.size(); ++k) x[k] = (y[k] - x[0] * x[0] - b) / a;
    return x;
}

std::pair<SampleMatrix, UndirectedGraph> gen_star_beta2(int d, std::size_t n, RngStream rng,
                                                        double a, double b) {
    constexpr double kStarSquashWiden = 6.0;
    if (d < 2) throw std::invalid_argument("gen_star_beta2: need d >= 2");
    // The diagonal transform is matched to each base variable's own moments:
    // x_1 = y_1/a has mean 0 and variance 1/a^2; x_k = (y_k - x_1^2 - b)/a has
    // mean -(1/a^2 + b)/a and variance (1 + 2/a^4)/a^2. Centering keeps the
    // squashing CDF in its resolvable transition zone.
    const double sigma1 = 1.0 / a;
    const double muk = -(1.0 / (a * a) + b) / a;
    const double sigmak = std::sqrt((1.0 + 2.0 / (a * a * a * a)) / (a * a));
    // The squash window is widened to 2.4 standard deviations (six times the
    // reference constants): a sharper window compresses the hub's tails so
    // much that no low-degree map can read the hub through it, and the
    // conditional independences become unidentifiable at these sample sizes.
    std::vector<CdfMarginalTransform> transforms;
    transforms.push_back(CdfMarginalTransform::standardized_argument(sigma1, 0.0, kStarSquashWiden));
    for (int k = 1; k < d; ++k)
        transforms.push_back(CdfMarginalTransform::standardized_argument(sigmak, muk, kStarSquashWiden));

    SampleMatrix out(n, d);
    RandomEngine eng(rng);
    Vector y(d);
    for (std::size_t l = 0; l < n; ++l) {
        for (int k = 0; k < d; ++k) y[k] = eng.normal();
        const Vector x = star_base_inverse(y, a, b);
        for (int k = 0; k < d; ++k) out(l, k) = transforms[k](x[k]);
    }
    UndirectedGraph truth(d);
    for (int k = 2; k <= d; ++k) truth.add_edge(1, k);
    return {std::move(out), truth};
}

Vector lorenz96_rhs(const Vector& z, double forcing, Lorenz96Convention convention) {
    const int d = static_cast<int>(z.size());
    if (d < 4) throw std::invalid_argument("lorenz96_rhs: need d >= 4");
    Vector rhs(d);
    const double sign = convention == Lorenz96Convention::standard_minus ? -1.0 : 1.0;
    for (int j = 0; j < d; ++j) {
        const double zp1 = z[(j + 1) % d];
        const double zm1 = z[(j - 1 + d) % d];
        const double zm2 = z[(j - 2 + d) % d];
        rhs[j] = (zp1 + sign * zm2) * zm1 - z[j] + forcing;
    }
    return rhs;
}

SampleMatrix lorenz96_trajectory(const Lorenz96Params& params, RngStream rng) {
    const int d = params.d;
    RandomEngine eng(rng);
    Vector z(d);
    for (int j = 0; j < d; ++j) z[j] = eng.normal();

    const long steps = std::lround(params.t_end / params.dt);
    std::vector<double> rows;
    long collected = 0;
    auto rhs = [&](const Vector& state) {
        return lorenz96_rhs(state, params.forcing, params.convention);
    };
    auto check_state = [&](const Vector& state) {
        for (double v : state)
            if (!(std::abs(v) <= 1e6))
                throw NumericalBlowup("lorenz96_trajectory: state magnitude exceeded 1e6");
    };
    auto collect = [&](const Vector& state) {
        ++collected;
        if (collected > params.burn_in) rows.insert(rows.end(), state.begin(), state.end());
    };

    collect(z);  // k = 0
    for (long step = 1; step <= steps; ++step) {
        z = rk4_step(rhs, z, params.dt);
        check_state(z);
        if (step % params.subsample == 0) collect(z);
    }

    SampleMatrix out;
    out.d = d;
    out.n = rows.size() / d;
    out.values = std::move(rows);
    return out;
}

}  // namespace sing
