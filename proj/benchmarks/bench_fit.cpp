#include <benchmark/benchmark.h>

#include "sing/datasets.hpp"
#include "sing/optimize.hpp"

using namespace sing;

namespace {

SampleMatrix chain_data(std::size_t n, int d) {
    auto [data, truth] = gen_gaussian(chain_precision(d, 0.2), n, RngStream{7, 0});
    return data;
}

void FitMapAffine(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    SampleMatrix data = chain_data(2000, d);
    for (auto _ : state) {
        FitResult fit = fit_map(data, SparsityPattern{}, 1);
        benchmark::DoNotOptimize(fit.objective);
    }
    state.SetComplexityN(d);
}
BENCHMARK(FitMapAffine)->Arg(3)->Arg(6)->Arg(10)->Complexity();

void FitMapQuadratic(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    SampleMatrix data = chain_data(2000, d);
    for (auto _ : state) {
        FitResult fit = fit_map(data, SparsityPattern{}, 2);
        benchmark::DoNotOptimize(fit.objective);
    }
}
BENCHMARK(FitMapQuadratic)->Arg(4)->Arg(8);

void FitAffineClosedForm(benchmark::State& state) {
    SampleMatrix data = chain_data(5000, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        FitResult fit = fit_affine_closed_form(data);
        benchmark::DoNotOptimize(fit.objective);
    }
}
BENCHMARK(FitAffineClosedForm)->Arg(5)->Arg(20);

}  // namespace
