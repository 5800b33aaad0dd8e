#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sing/graph.hpp"
#include "sing/matrix.hpp"
#include "sing/rng.hpp"
#include "sing/sample_matrix.hpp"

namespace sing {

// Describes one generated dataset for reporting; parameters are the family's
// numeric knobs.
struct DatasetSpec {
    std::string family;
    std::map<std::string, double> parameters;
    UndirectedGraph truth;
};

std::string dataset_spec_to_json(const DatasetSpec& spec);

// ---- Gaussian baselines ----

// Tridiagonal precision with unit diagonal and the given coupling on the
// off-diagonals adjacent to the diagonal; the graph is the chain.
Matrix chain_precision(int d, double coupling = 0.2);

// Samples from N(0, precision^{-1}); the truth graph is the support of the
// precision's off-diagonal entries.
std::pair<SampleMatrix, UndirectedGraph> gen_gaussian(const Matrix& precision, std::size_t n,
                                                      RngStream rng);

// ---- Butterfly: r independent pairs (P_i, Q_i) with Q_i = W_i P_i ----
// Columns ordered P_1, Q_1, ..., P_r, Q_r; the truth is r disjoint edges.
std::pair<SampleMatrix, UndirectedGraph> gen_butterfly(int r, std::size_t n, RngStream rng);

// ---- Nonparanormal random graphs ----

struct NonparanormalModel {
    UndirectedGraph truth;
    Matrix precision;  // unit diagonal, 0.245 on edges
};

// Random geometric-flavored graph: node positions uniform in [0,1]^2, pair
// (i,j) accepted with probability (1/sqrt(2 pi)) exp(-|y_i - y_j|^2 / (2 s)),
// rejecting additions that would push a node beyond max_degree.
NonparanormalModel gen_nonparanormal_graph(int d, double s, int max_degree, RngStream rng);

// Strictly increasing marginal transform built from a Gaussian CDF squashing
// function f0 (location 0.05, scale 0.4), standardized under N(0, sigma^2) so
// the pushforward keeps mean 0 and standard deviation sigma. The two
// Gaussian-weighted integrals use Gauss-Hermite order 100, cached per
// instance.
class CdfMarginalTransform {
  public:
    // Literal form: squashes x itself and standardizes under N(mu, sigma^2).
    explicit CdfMarginalTransform(double sigma, double mu = 0.0);
    // Squashes the standardized argument (x - mu)/sigma instead, keeping the
    // squashing window centered on the variable whatever its scale; the
    // window_scale widens the squash relative to the reference constants.
    static CdfMarginalTransform standardized_argument(double sigma, double mu,
                                                      double window_scale = 1.0);

    double operator()(double x) const;
    double sigma() const { return sigma_; }

  private:
    CdfMarginalTransform() = default;
    double sigma_ = 1.0, mu_ = 0.0, mean_f0_ = 0.0, sqrt_var_f0_ = 1.0;
    double window_scale_ = 1.0;
    bool standardize_arg_ = false;
};

// Marginal transform from f0(t) = sign(t) |t|^a, normalized the same way.
class PowerMarginalTransform {
  public:
    PowerMarginalTransform(double a, double sigma);
    double operator()(double x) const;

  private:
    double sigma_, a_, sqrt_moment_;
};

// Convenience wrappers around the classes above (k is 1-based and only
// documents which variable the parameters belong to).
double cdf_transform_inverse(double x, int k, double sigma_kk);
double power_transform_inverse(double x, int k, double a, double sigma_kk);

enum class MarginalTransformKind { gaussian_cdf, power };

// Draws x ~ N(0, precision^{-1}) and applies the inverse marginal transform
// componentwise with sigma_k = sqrt((precision^{-1})_kk).
SampleMatrix sample_nonparanormal(const NonparanormalModel& model, std::size_t n,
                                  MarginalTransformKind kind, double power_a, RngStream rng);

// ---- Cubic transformation of a 3-d Gaussian chain ----

struct CubicDataset {
    SampleMatrix samples;  // z = x^3 componentwise, x ~ N(0, Sigma_rho)
    UndirectedGraph truth; // chain 1-2-3
    Matrix gaussian_approx_precision;  // inverse of the analytic moment matrix
};

// Covariance of the base Gaussian (inverse of the 0.2-coupling chain precision).
Matrix cubic_base_covariance();
// Analytic covariance of the cubed variables: 9 s_ii s_jj s_ij + 6 s_ij^3.
Matrix cubic_gaussian_approx_covariance();
CubicDataset gen_cubic(std::size_t n, RngStream rng);

// ---- Star graph from a quadratic base map composed with a CDF marginal ----

// Inverse of the base map S^1 = a x_1, S^k = (x_1^2 + b) + a x_k.
Vector star_base_inverse(const Vector& y, double a, double b);
std::pair<SampleMatrix, UndirectedGraph> gen_star_beta2(int d, std::size_t n, RngStream rng,
                                                        double a = 1.0, double b = 1.0);

// ---- Lorenz-96 ----

// The quadratic advection term admits a sign variant, (Z_{j+1} + Z_{j-2}) Z_{j-1};
// the standard chaotic system uses the minus and is the default.
enum class Lorenz96Convention { standard_minus, plus_variant };

Vector lorenz96_rhs(const Vector& z, double forcing,
                    Lorenz96Convention convention = Lorenz96Convention::standard_minus);

// One classical fourth-order Runge-Kutta step of dz/dt = rhs(z).
template <typename Rhs>
Vector rk4_step(const Rhs& rhs, const Vector& z, double dt) {
    const std::size_t d = z.size();
    Vector tmp(d), out(d);
    const Vector k1 = rhs(z);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
    const Vector k2 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
    const Vector k3 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = z[i] + dt * k3[i];
    const Vector k4 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i)
        out[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

struct Lorenz96Params {
    int d = 15;
    double forcing = 8.0;
    double dt = 0.01;
    double t_end = 1600.0;
    int subsample = 40;
    int burn_in = 1000;
    Lorenz96Convention convention = Lorenz96Convention::standard_minus;
};

// RK4 integration from z(0) ~ N(0, I); rows are the sub-sampled states after
// the burn-in. Throws NumericalBlowup when any state magnitude exceeds 1e6.
SampleMatrix lorenz96_trajectory(const Lorenz96Params& params, RngStream rng);

}  // namespace sing
