#include <cmath>

#include "doctest.h"
#include "sing/errors.hpp"
#include "sing/oracle.hpp"
#include "sing/rng.hpp"
#include "sing/transport.hpp"
#include "test_helpers.hpp"

using namespace sing;

namespace {

constexpr double kEps = 1e-8;

TriangularMap single_component_map(int degree) {
    return make_triangular_map(1, SparsityPattern{}, degree, 32, kEps);
}

}  // namespace

TEST_CASE("eval_component constant integrand") {
    TriangularMap map = single_component_map(1);
    map.components[0].c_coeffs[0] = 0.0;
    map.components[0].h_coeffs[0] = 1.0;
    CHECK(eval_component(map, 1, {2.0}) == doctest::Approx(2.0 * (1.0 + kEps)));
}

TEST_CASE("eval_component degenerate h") {
    TriangularMap map = single_component_map(1);
    map.components[0].c_coeffs[0] = 5.0;
    map.components[0].h_coeffs[0] = 0.0;
    CHECK(eval_component(map, 1, {3.0}) == doctest::Approx(5.0 + 3.0 * kEps));
}

TEST_CASE("eval_component linear h integrates t^2") {
    TriangularMap map = single_component_map(2);
    auto& mc = map.components[0];
    REQUIRE(mc.h_basis.size() == 2);
    mc.h_coeffs[0] = 0.0;
    mc.h_coeffs[1] = 1.0;  // h(t) = t
    CHECK(std::abs(eval_component(map, 1, {1.0}) - (1.0 / 3.0 + kEps)) < 1e-10);
}

TEST_CASE("partial_k is g(h)") {
    TriangularMap map = single_component_map(1);
    map.components[0].h_coeffs[0] = 0.0;
    CHECK(partial_k(map, 1, {0.3}) == doctest::Approx(kEps));
    map.components[0].h_coeffs[0] = 2.0;
    CHECK(partial_k(map, 1, {0.3}) == doctest::Approx(4.0 + kEps));
}

TEST_CASE("partial_k positive for random maps") {
    RandomEngine eng(RngStream{31, 0});
    for (int trial = 0; trial < 5; ++trial) {
        TriangularMap map = testutil::random_map(3, 2, eng);
        for (int rep = 0; rep < 100; ++rep) {
            Vector z = testutil::random_point(3, eng, 2.0);
            for (int k = 1; k <= 3; ++k) CHECK(partial_k(map, k, z) > 0.0);
        }
    }
}

TEST_CASE("log_pullback of the identity map") {
    TriangularMap id1 = make_identity_map(1);
    CHECK(log_pullback(id1, {0.0}) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-7));
    TriangularMap id2 = make_identity_map(2);
    CHECK(log_pullback(id2, {1.0, 1.0}) ==
          doctest::Approx(-1.0 - std::log(2.0 * M_PI)).epsilon(1e-7));
}

TEST_CASE("affine map pullback equals the Gaussian density") {
    RandomEngine eng(RngStream{32, 0});
    Matrix cov = testutil::random_spd(3, eng);
    Vector mean{0.3, -0.7, 1.1};
    Matrix lower = invert_lower_triangular(cholesky(cov));
    TriangularMap map = make_affine_map(lower, mean);
    GaussianDensity density(mean, cov);
    for (int trial = 0; trial < 20; ++trial) {
        Vector z = testutil::random_point(3, eng, 2.0);
        for (int i = 0; i < 3; ++i) z[i] += mean[i];
        CHECK(std::abs(log_pullback(map, z) - density.log_density(z)) < 1e-8);
    }
}

TEST_CASE("mixed_log_hessian of the identity map is zero") {
    TriangularMap id3 = make_identity_map(3);
    RandomEngine eng(RngStream{33, 0});
    for (int trial = 0; trial < 5; ++trial) {
        Vector z = testutil::random_point(3, eng);
        CHECK(mixed_log_hessian(id3, z, 1, 2) == doctest::Approx(0.0));
        CHECK(mixed_log_hessian(id3, z, 1, 3) == doctest::Approx(0.0));
        CHECK(mixed_log_hessian(id3, z, 2, 3) == doctest::Approx(0.0));
    }
}

TEST_CASE("mixed_log_hessian of a Gaussian pullback is minus the precision entry") {
    // Sigma = [[1, 0.2], [0.2, 1]]; d_i d_j log density = -(Sigma^{-1})_12
    // = 0.2 / (1 - 0.04), constant in z.
    Matrix cov(2, 2);
    cov(0, 0) = 1.0;
    cov(0, 1) = 0.2;
    cov(1, 0) = 0.2;
    cov(1, 1) = 1.0;
    Matrix lower = invert_lower_triangular(cholesky(cov));
    TriangularMap map = make_affine_map(lower, {0.0, 0.0});
    const double expected = 0.2 / 0.96;
    RandomEngine eng(RngStream{34, 0});
    for (int trial = 0; trial < 10; ++trial) {
        Vector z = testutil::random_point(2, eng, 2.0);
        CHECK(mixed_log_hessian(map, z, 1, 2) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("mixed_log_hessian matches finite differences on random maps") {
    RandomEngine eng(RngStream{35, 0});
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int d = 2 + trial % 3;
        const int degree = 1 + trial % 3;
        TriangularMap map = testutil::random_map(d, degree, eng);
        auto f = [&](const Vector& z) { return log_pullback(map, z); };
        for (int rep = 0; rep < 3; ++rep) {
            Vector z = testutil::random_point(d, eng);
            for (int i = 1; i <= d; ++i)
                for (int j = i + 1; j <= d; ++j) {
                    const double got = mixed_log_hessian(map, z, i, j);
                    const double fd = testutil::fd_mixed(f, z, i, j);
                    CHECK(std::abs(got - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
                    ++checked;
                }
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("mixed_log_hessian argument order does not matter") {
    RandomEngine eng(RngStream{36, 0});
    TriangularMap map = testutil::random_map(4, 2, eng);
    Vector z = testutil::random_point(4, eng);
    CHECK(mixed_log_hessian(map, z, 3, 1) == doctest::Approx(mixed_log_hessian(map, z, 1, 3)));
}

TEST_CASE("coeff_gradient: constant-c entry equals minus the component value") {
    RandomEngine eng(RngStream{37, 0});
    TriangularMap map = testutil::random_map(3, 2, eng, 0.0);
    Vector z = testutil::random_point(3, eng);
    Vector grad = coeff_gradient_log_pullback(map, z);
    std::size_t pos = 0;
    for (int k = 1; k <= 3; ++k) {
        const auto& mc = map.components[k - 1];
        // The constant index is first in the c block.
        CHECK(grad[pos] == doctest::Approx(-eval_component(map, k, z)).epsilon(1e-9));
        pos += mc.coefficient_count();
    }
}

TEST_CASE("coeff_gradient matches finite differences") {
    RandomEngine eng(RngStream{38, 0});
    for (int trial = 0; trial < 6; ++trial) {
        const int d = 2 + trial % 3;
        const int degree = 1 + trial % 3;
        TriangularMap map = testutil::random_map(d, degree, eng);
        Vector z = testutil::random_point(d, eng);
        Vector grad = coeff_gradient_log_pullback(map, z);
        Vector coef = get_coefficients(map);
        const double h = 1e-5;
        for (std::size_t a = 0; a < coef.size(); a += 1 + a / 7) {
            Vector cp = coef, cm = coef;
            cp[a] += h;
            cm[a] -= h;
            TriangularMap mp = map, mm = map;
            set_coefficients(mp, cp);
            set_coefficients(mm, cm);
            const double fd = (log_pullback(mp, z) - log_pullback(mm, z)) / (2.0 * h);
            CHECK(std::abs(grad[a] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("coeff_gradient is separable across components") {
    RandomEngine eng(RngStream{39, 0});
    TriangularMap map = testutil::random_map(3, 2, eng);
    Vector z = testutil::random_point(3, eng);
    Vector grad = coeff_gradient_log_pullback(map, z);
    // Perturbing component 3's coefficients must not change components 1-2
    // values, so their gradient blocks stay put.
    TriangularMap map2 = map;
    for (auto& c : map2.components[2].c_coeffs) c += 0.5;
    Vector grad2 = coeff_gradient_log_pullback(map2, z);
    const std::size_t block12 =
        map.components[0].coefficient_count() + map.components[1].coefficient_count();
    for (std::size_t a = 0; a < block12; ++a) CHECK(grad[a] == doctest::Approx(grad2[a]));
}

TEST_CASE("invert identity and scaling") {
    TriangularMap id2 = make_identity_map(2);
    Vector x{0.7, -1.3};
    Vector z = invert(id2, x);
    CHECK(z[0] == doctest::Approx(0.7));
    CHECK(z[1] == doctest::Approx(-1.3));

    // S(z) = 2z in one dimension.
    Matrix two(1, 1);
    two(0, 0) = 2.0;
    TriangularMap map = make_affine_map(two, {0.0});
    CHECK(invert(map, {4.0})[0] == doctest::Approx(2.0));
}

TEST_CASE("invert round trip on random monotone maps") {
    RandomEngine eng(RngStream{40, 0});
    for (int trial = 0; trial < 5; ++trial) {
        const int d = 2 + trial % 3;
        TriangularMap map = testutil::random_map(d, 1 + trial % 3, eng);
        for (int rep = 0; rep < 4; ++rep) {
            Vector z = testutil::random_point(d, eng);
            Vector x = eval_map(map, z);
            Vector back = invert(map, x);
            for (int i = 0; i < d; ++i) CHECK(std::abs(back[i] - z[i]) < 1e-8);
        }
    }
}

TEST_CASE("sparsity pattern removes the variable exactly") {
    SparsityPattern pattern;
    pattern.add(1, 3);
    TriangularMap map = make_triangular_map(3, pattern, 2);
    RandomEngine eng(RngStream{41, 0});
    for (auto& c : map.components[2].c_coeffs) c = eng.normal();
    for (auto& h : map.components[2].h_coeffs) h = eng.normal();
    Vector z{0.4, -0.2, 0.9};
    Vector z2 = z;
    z2[0] = -5.0;  // variable 1 must be absent from component 3
    CHECK(eval_component(map, 3, z) == eval_component(map, 3, z2));
    CHECK(partial_k(map, 3, z) == partial_k(map, 3, z2));
}

TEST_CASE("map JSON round trip") {
    RandomEngine eng(RngStream{42, 0});
    TriangularMap map = testutil::random_map(4, 3, eng);
    TriangularMap back = map_from_json(map_to_json(map));
    CHECK(back.dimension == map.dimension);
    CHECK(back.sparsity.pairs == map.sparsity.pairs);
    CHECK(back.quadrature_order == map.quadrature_order);
    Vector coef_a = get_coefficients(map);
    Vector coef_b = get_coefficients(back);
    REQUIRE(coef_a.size() == coef_b.size());
    for (std::size_t i = 0; i < coef_a.size(); ++i) CHECK(coef_a[i] == coef_b[i]);
    Vector z = testutil::random_point(4, eng);
    CHECK(log_pullback(back, z) == doctest::Approx(log_pullback(map, z)));
}

TEST_CASE("sparsity pattern validates its pairs") {
    SparsityPattern p;
    CHECK_THROWS_AS(p.add(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(p.add(4, 2), std::invalid_argument);
    p.add(1, 2);
    CHECK(p.contains(1, 2));
    CHECK_FALSE(p.contains(1, 3));
}

TEST_CASE("map JSON rejects coefficient mismatches") {
    TriangularMap map = make_identity_map(2);
    std::string json = map_to_json(map);
    // Drop one coefficient from the first component's h block.
    const auto pos = json.find("\"h_coeffs\"");
    REQUIRE(pos != std::string::npos);
    std::string broken = json;
    broken.replace(pos, std::string("\"h_coeffs\"").size(), "\"h_coeffs_bad\"");
    CHECK_THROWS(map_from_json(broken));
}
