#include <algorithm>
#include <cmath>

#include "doctest.h"
#include <cstdio>

#include "sing/datasets.hpp"
#include "sing/sample_matrix.hpp"
#include "sing/errors.hpp"
#include "test_helpers.hpp"

using namespace sing;

namespace {

double column_mean(const SampleMatrix& m, int col) {
    double s = 0.0;
    for (std::size_t l = 0; l < m.n; ++l) s += m(l, col);
    return s / double(m.n);
}

double column_std(const SampleMatrix& m, int col) {
    const double mean = column_mean(m, col);
    double s = 0.0;
    for (std::size_t l = 0; l < m.n; ++l) s += (m(l, col) - mean) * (m(l, col) - mean);
    return std::sqrt(s / double(m.n));
}

double correlation(const SampleMatrix& m, int a, int b) {
    const double ma = column_mean(m, a), mb = column_mean(m, b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t l = 0; l < m.n; ++l) {
        sab += (m(l, a) - ma) * (m(l, b) - mb);
        saa += (m(l, a) - ma) * (m(l, a) - ma);
        sbb += (m(l, b) - mb) * (m(l, b) - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("butterfly pairs are uncorrelated but dependent") {
    auto [data, truth] = gen_butterfly(5, 10000, RngStream{401, 0});
    REQUIRE(data.d == 10);
    CHECK(truth.edge_count() == 5);
    for (int i = 1; i <= 5; ++i) CHECK(truth.has_edge(2 * i - 1, 2 * i));

    SampleMatrix squared = data;
    for (double& v : squared.values) v = v * v;
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(correlation(data, 2 * i, 2 * i + 1)) < 0.05);
        CHECK(correlation(squared, 2 * i, 2 * i + 1) > 0.2);
    }
}

TEST_CASE("nonparanormal graph respects the degree cap and stays SPD") {
    NonparanormalModel model = gen_nonparanormal_graph(10, 3.0, 4, RngStream{402, 0});
    for (int deg : model.truth.degrees()) CHECK(deg <= 4);
    CHECK_NOTHROW(cholesky(model.precision));
    CHECK(model.truth.edge_count() >= 1);

    // Vanishing s kills the acceptance probability for distinct positions.
    NonparanormalModel sparse = gen_nonparanormal_graph(10, 1e-8, 4, RngStream{402, 0});
    CHECK(sparse.truth.edge_count() == 0);
}

TEST_CASE("cdf marginal transform standardizes and stays monotone") {
    const double sigma = 1.3;
    CdfMarginalTransform f(sigma);
    // Grid kept inside the range where the squashing CDF is resolvable in
    // double precision (it saturates to exactly 1 beyond ~8 of its scales).
    double prev = f(-3.0);
    for (int i = 1; i <= 50; ++i) {
        const double x = -3.0 + 6.0 * i / 50.0;
        const double v = f(x);
        CHECK(v > prev);
        prev = v;
    }
    RandomEngine eng(RngStream{403, 0});
    const std::size_t n = 100000;
    double mean = 0.0, var = 0.0;
    std::vector<double> pushed(n);
    for (std::size_t l = 0; l < n; ++l) {
        pushed[l] = f(sigma * eng.normal());
        mean += pushed[l];
    }
    mean /= double(n);
    for (double v : pushed) var += (v - mean) * (v - mean);
    var /= double(n);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(std::sqrt(var) - sigma) < 0.05);

    // Histogram of the pushforward is bimodal: both shoulders beat the middle.
    int low = 0, mid = 0, high = 0;
    for (double v : pushed) {
        if (v < -0.8 * sigma)
            ++low;
        else if (v > 0.8 * sigma)
            ++high;
        else if (std::abs(v) < 0.4 * sigma)
            ++mid;
    }
    CHECK(low > mid);
    CHECK(high > mid);
}

TEST_CASE("power marginal transform matches the analytic cubic normalizer") {
    const double sigma = 0.9;
    PowerMarginalTransform f(3.0, sigma);
    // E|T|^6 = 15 sigma^6, so F(x) = sigma x^3 / (sqrt(15) sigma^3).
    for (double x : {-2.0, -0.5, 0.3, 1.7}) {
        const double want = sigma * x * x * x / (std::sqrt(15.0) * sigma * sigma * sigma);
        CHECK(f(x) == doctest::Approx(want).epsilon(1e-10));
        CHECK(f(-x) == doctest::Approx(-f(x)));
    }
    CHECK(f(0.2) > f(0.1));
}

TEST_CASE("cubic dataset matches the reference precision values") {
    const Matrix prec = gen_cubic(10, RngStream{404, 0}).gaussian_approx_precision;
    CHECK(testutil::rel_err(prec(0, 0), 5.96e-2) < 2e-3);
    CHECK(testutil::rel_err(prec(0, 1), 6.99e-3) < 2e-3);
    CHECK(testutil::rel_err(prec(0, 2), -5.56e-4) < 2e-3);
    CHECK(testutil::rel_err(prec(1, 1), 5.36e-2) < 2e-3);
    CHECK(prec(0, 1) == doctest::Approx(prec(1, 2)));
}

TEST_CASE("cubic moment identity against Monte Carlo") {
    const Matrix target = cubic_gaussian_approx_covariance();
    CubicDataset ds = gen_cubic(200000, RngStream{405, 0});
    // The samples are already the cubed base draws.
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double mc = 0.0;
            for (std::size_t l = 0; l < ds.samples.n; ++l)
                mc += ds.samples(l, i) * ds.samples(l, j);
            mc /= double(ds.samples.n);
            CHECK(testutil::rel_err(mc, target(i, j), 0.2) < 0.08);
        }
    // Diagonal is the sixth Gaussian moment: 15 sigma^3.
    const Matrix base = cubic_base_covariance();
    for (int i = 0; i < 3; ++i)
        CHECK(target(i, i) ==
              doctest::Approx(15.0 * base(i, i) * base(i, i) * base(i, i)).epsilon(1e-12));
    CHECK(ds.truth.has_edge(1, 2));
    CHECK(ds.truth.has_edge(2, 3));
    CHECK(ds.truth.edge_count() == 2);
}

TEST_CASE("star generator moments and structure") {
    // x_2 = y_2 - y_1^2 - 1 has mean -2 before any standardization.
    RandomEngine eng(RngStream{406, 0});
    double mean = 0.0;
    const int n = 20000;
    for (int l = 0; l < n; ++l) {
        Vector y{eng.normal(), eng.normal()};
        mean += star_base_inverse(y, 1.0, 1.0)[1];
    }
    CHECK(std::abs(mean / n + 2.0) < 0.06);

    auto [data, truth] = gen_star_beta2(5, 100, RngStream{407, 0});
    CHECK(truth.edge_count() == 4);
    for (int k = 2; k <= 5; ++k) CHECK(truth.has_edge(1, k));

    // Component k of the base map touches only y_1 and y_k.
    Vector y{0.3, -0.2, 0.8, 1.0, -0.5};
    Vector x = star_base_inverse(y, 1.0, 1.0);
    Vector y2 = y;
    y2[2] = 5.0;  // perturb y_3: x_4 and x_5 must not move
    Vector x2 = star_base_inverse(y2, 1.0, 1.0);
    CHECK(x2[3] == x[3]);
    CHECK(x2[4] == x[4]);
    CHECK(x2[2] != x[2]);
}

TEST_CASE("lorenz96 right-hand side") {
    // Constant state at the forcing value is an equilibrium.
    Vector z(6, 8.0);
    for (double v : lorenz96_rhs(z, 8.0)) CHECK(v == doctest::Approx(0.0));

    // Hand-evaluated unit vector case.
    Vector e1{1.0, 0.0, 0.0, 0.0};
    Vector rhs = lorenz96_rhs(e1, 0.0);
    CHECK(rhs[0] == doctest::Approx(-1.0));
    CHECK(rhs[1] == doctest::Approx(0.0));
    CHECK(rhs[2] == doctest::Approx(0.0));
    CHECK(rhs[3] == doctest::Approx(0.0));

    // Rotating the state rotates the derivative.
    RandomEngine eng(RngStream{408, 0});
    Vector state(7);
    for (auto& v : state) v = eng.normal();
    Vector rotated(7);
    for (int j = 0; j < 7; ++j) rotated[j] = state[(j + 1) % 7];
    Vector r1 = lorenz96_rhs(state, 8.0);
    Vector r2 = lorenz96_rhs(rotated, 8.0);
    for (int j = 0; j < 7; ++j) CHECK(r2[j] == doctest::Approx(r1[(j + 1) % 7]));
}

TEST_CASE("rk4 step reproduces the exponential decay") {
    auto decay = [](const Vector& z) { return Vector{-z[0]}; };
    Vector next = rk4_step(decay, {1.0}, 0.01);
    CHECK(std::abs(next[0] - std::exp(-0.01)) < 1e-10);
    CHECK(next[0] == doctest::Approx(0.990049834).epsilon(1e-9));
}

TEST_CASE("lorenz96 trajectory with a short run") {
    Lorenz96Params p;
    p.t_end = 120.0;  // 12000 steps -> 301 sub-sampled states
    p.burn_in = 100;
    SampleMatrix traj = lorenz96_trajectory(p, RngStream{409, 0});
    CHECK(traj.d == 15);
    CHECK(traj.n == 201);
    double maxabs = 0.0;
    for (double v : traj.values) maxabs = std::max(maxabs, std::abs(v));
    CHECK(maxabs < 25.0);

    // Determinism and stream separation.
    SampleMatrix again = lorenz96_trajectory(p, RngStream{409, 0});
    CHECK(again.values == traj.values);
    SampleMatrix other = lorenz96_trajectory(p, RngStream{409, 1});
    CHECK(other.values != traj.values);
}

TEST_CASE("lorenz96 blowup detection") {
    Lorenz96Params p;
    p.d = 5;
    p.dt = 5.0;  // wildly unstable step
    p.t_end = 500.0;
    p.subsample = 1;
    p.burn_in = 0;
    CHECK_THROWS_AS(lorenz96_trajectory(p, RngStream{410, 0}), NumericalBlowup);
}

TEST_CASE("gaussian chain generator") {
    const Matrix prec = chain_precision(4, 0.2);
    auto [data, truth] = gen_gaussian(prec, 40000, RngStream{411, 0});
    CHECK(truth.edge_count() == 3);
    CHECK(truth.has_edge(1, 2));
    CHECK_FALSE(truth.has_edge(1, 3));
    // Empirical covariance approaches the inverse precision.
    const Matrix cov = inverse_spd(prec);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < data.n; ++l) s += data(l, i) * data(l, j);
            s /= double(data.n);
            CHECK(std::abs(s - cov(i, j)) < 0.04);
        }
}

TEST_CASE("dataset generators are reproducible per stream") {
    auto [a, ta] = gen_butterfly(3, 50, RngStream{412, 7});
    auto [b, tb] = gen_butterfly(3, 50, RngStream{412, 7});
    CHECK(a.values == b.values);
    auto [c, tc] = gen_butterfly(3, 50, RngStream{412, 8});
    CHECK(a.values != c.values);
}

TEST_CASE("samples CSV rejects ragged rows") {
    const std::string path = "/tmp/sing_test_ragged.csv";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fprintf(f, "1,2,3\n4,5\n");
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_samples_csv(path), Error);
}
