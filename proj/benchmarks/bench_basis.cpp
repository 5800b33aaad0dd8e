#include <benchmark/benchmark.h>

#include "sing/basis.hpp"
#include "sing/quadrature.hpp"
#include "sing/rng.hpp"

using namespace sing;

namespace {

void EvalBasisTotalDegree(benchmark::State& state) {
    const int vars = static_cast<int>(state.range(0));
    const int degree = static_cast<int>(state.range(1));
    std::vector<int> active;
    for (int v = 1; v <= vars; ++v) active.push_back(v);
    BasisSet b = total_degree_set(active, degree);
    RandomEngine eng(RngStream{3, 0});
    Vector point(vars);
    for (auto& p : point) p = eng.normal();
    for (auto _ : state) {
        Vector values = eval_basis(b, point);
        benchmark::DoNotOptimize(values.data());
    }
}
BENCHMARK(EvalBasisTotalDegree)->Args({5, 2})->Args({10, 3})->Args({15, 2});

void GaussLegendreNodes(benchmark::State& state) {
    for (auto _ : state) {
        QuadratureRule rule = gauss_legendre(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(rule.nodes.data());
    }
}
BENCHMARK(GaussLegendreNodes)->Arg(8)->Arg(32)->Arg(128);

void GaussHermiteNodes(benchmark::State& state) {
    for (auto _ : state) {
        QuadratureRule rule = gauss_hermite(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(rule.nodes.data());
    }
}
BENCHMARK(GaussHermiteNodes)->Arg(100);

}  // namespace
