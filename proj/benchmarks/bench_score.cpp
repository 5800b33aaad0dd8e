#include <benchmark/benchmark.h>

#include "sing/datasets.hpp"
#include "sing/driver.hpp"
#include "sing/optimize.hpp"
#include "sing/score.hpp"

using namespace sing;

namespace {

struct Fitted {
    SampleMatrix data;
    FitResult fit;
    Matrix fisher;
};

Fitted fitted_instance(std::size_t n, int d, int beta) {
    auto [raw, truth] = gen_gaussian(chain_precision(d, 0.2), n, RngStream{11, 0});
    Fitted out;
    out.data = std::move(raw);
    out.fit = fit_map(out.data, SparsityPattern{}, beta);
    out.fisher = fisher_information(out.fit.map, out.data);
    return out;
}

void EstimateScore(benchmark::State& state) {
    Fitted f = fitted_instance(2000, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        ScoreMatrix score = estimate_score(f.fit.map, f.data);
        benchmark::DoNotOptimize(score.omega.data.data());
    }
}
BENCHMARK(EstimateScore)->Arg(5)->Arg(10);

void EstimateVariances(benchmark::State& state) {
    Fitted f = fitted_instance(2000, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        ScoreMatrix score = estimate_variances(f.fit.map, f.data, f.fisher);
        benchmark::DoNotOptimize(score.variance.data.data());
    }
}
BENCHMARK(EstimateVariances)->Arg(5)->Arg(10);

void FisherInformation(benchmark::State& state) {
    Fitted f = fitted_instance(2000, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        Matrix gamma = fisher_information(f.fit.map, f.data);
        benchmark::DoNotOptimize(gamma.data.data());
    }
}
BENCHMARK(FisherInformation)->Arg(5)->Arg(10);

void EndToEndSing(benchmark::State& state) {
    auto [data, truth] = gen_butterfly(3, 1000, RngStream{13, 0});
    SingConfig cfg;
    cfg.beta = 2;
    for (auto _ : state) {
        SingReport report = run_sing(data, cfg);
        benchmark::DoNotOptimize(report.final_edges.d);
    }
}
BENCHMARK(EndToEndSing);

}  // namespace
