#include <cstdlib>

#include "doctest.h"
#include "sing/datasets.hpp"
#include "sing/driver.hpp"
#include "sing/errors.hpp"
#include "test_helpers.hpp"

using namespace sing;

TEST_CASE("standardize columns") {
    SampleMatrix data(2, 1);
    data(0, 0) = 1.0;
    data(1, 0) = 3.0;
    auto [out, st] = standardize(data);
    CHECK(out(0, 0) == doctest::Approx(-1.0));
    CHECK(out(1, 0) == doctest::Approx(1.0));
    CHECK(st.mean[0] == doctest::Approx(2.0));
    CHECK(st.std[0] == doctest::Approx(1.0));

    auto [twice, st2] = standardize(out);
    CHECK(std::abs(twice(0, 0) - out(0, 0)) < 1e-12);
    CHECK(std::abs(twice(1, 0) - out(1, 0)) < 1e-12);
}

TEST_CASE("standardize rejects constant columns") {
    SampleMatrix data(3, 2);
    for (int l = 0; l < 3; ++l) {
        data(l, 0) = l;
        data(l, 1) = 42.0;
    }
    CHECK_THROWS_AS(standardize(data), DegenerateColumn);
}

TEST_CASE("n_sing finds no edges between independent normals") {
    RandomEngine eng(RngStream{501, 0});
    SampleMatrix data = testutil::random_samples(5000, 2, eng);
    SingConfig cfg;
    cfg.beta = 1;
    auto [graph, score] = n_sing(data, cfg);
    CHECK(graph.edge_count() == 0);
}

TEST_CASE("n_sing recovers the Gaussian chain") {
    auto [data, truth] = gen_gaussian(chain_precision(3, 0.2), 5000, RngStream{502, 0});
    SingConfig cfg;
    cfg.beta = 1;
    auto [graph, score] = n_sing(data, cfg);
    CHECK(graph == truth);
    CHECK(score.omega_at(1, 2) > score.omega_at(1, 3));
}

TEST_CASE("n_sing equals the first iteration of the iterative driver") {
    auto [data, truth] = gen_gaussian(chain_precision(4, 0.25), 2000, RngStream{503, 0});
    SingConfig cfg;
    cfg.beta = 1;
    auto [graph, score] = n_sing(data, cfg);
    SingReport report = run_sing(data, cfg);
    REQUIRE(!report.iterations.empty());
    CHECK(report.iterations[0].edges == graph);
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) {
            CHECK(report.iterations[0].score.omega_at(i, j) ==
                  doctest::Approx(score.omega_at(i, j)));
            CHECK(report.iterations[0].score.variance_at(i, j) ==
                  doctest::Approx(score.variance_at(i, j)));
        }
}

TEST_CASE("sing runs are deterministic, also across thread counts") {
    auto [data, truth] = gen_gaussian(chain_precision(3, 0.2), 1500, RngStream{504, 0});
    SingConfig cfg;
    cfg.beta = 1;
    setenv("SING_THREADS", "1", 1);
    const std::string a = report_to_json(run_sing(data, cfg));
    const std::string b = report_to_json(run_sing(data, cfg));
    setenv("SING_THREADS", "3", 1);
    const std::string c = report_to_json(run_sing(data, cfg));
    unsetenv("SING_THREADS");
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("per-iteration records are self-consistent in original labels") {
    auto [data, truth] = gen_butterfly(3, 1500, RngStream{505, 0});
    SingConfig cfg;
    cfg.beta = 2;
    cfg.max_iterations = 4;
    SingReport report = run_sing(data, cfg);
    REQUIRE(!report.iterations.empty());
    for (const auto& it : report.iterations) {
        CHECK(it.edge_count == it.edges.edge_count());
        // Thresholding the reported (original-label) matrices reproduces the
        // reported edge set exactly: an edge needs a nonzero score at or above
        // its threshold.
        UndirectedGraph rebuilt(truth.d);
        for (int i = 1; i <= truth.d; ++i)
            for (int j = i + 1; j <= truth.d; ++j)
                if (it.score.omega_at(i, j) >= it.tau(i - 1, j - 1) &&
                    it.score.omega_at(i, j) > 0.0)
                    rebuilt.add_edge(i, j);
        CHECK(rebuilt == it.edges);
        CHECK(it.ordering.is_valid());
    }
    // The final edge set is one of the recorded iterations' edge sets.
    const auto& last = report.iterations.back();
    const bool final_is_last = report.final_edges == last.edges;
    const bool final_is_prev =
        report.iterations.size() >= 2 &&
        report.final_edges == report.iterations[report.iterations.size() - 2].edges;
    CHECK((final_is_last || final_is_prev));
}

TEST_CASE("stopping honors the edge-count rule and the iteration cap") {
    auto [data, truth] = gen_gaussian(chain_precision(3, 0.2), 4000, RngStream{506, 0});
    SingConfig cfg;
    cfg.beta = 1;
    SingReport report = run_sing(data, cfg);
    CHECK(report.stopped_reason == StopReason::edge_count_non_decreasing);
    CHECK(report.iterations.size() <= 3);
    CHECK(report.final_edges == truth);

    cfg.max_iterations = 1;
    SingReport capped = run_sing(data, cfg);
    CHECK(capped.stopped_reason == StopReason::max_iterations);
    CHECK(capped.iterations.size() == 1);
}

TEST_CASE("run_sing validates its configuration") {
    SampleMatrix data(10, 2);
    RandomEngine eng(RngStream{507, 0});
    for (auto& v : data.values) v = eng.normal();
    SingConfig bad;
    bad.beta = 0;
    CHECK_THROWS_AS(run_sing(data, bad), std::invalid_argument);
    bad.beta = 1;
    bad.c = 0.0;
    CHECK_THROWS_AS(run_sing(data, bad), std::invalid_argument);
}

TEST_CASE("report JSON carries the stop reason") {
    auto [data, truth] = gen_gaussian(chain_precision(3, 0.2), 800, RngStream{508, 0});
    SingConfig cfg;
    cfg.beta = 1;
    const std::string json = report_to_json(run_sing(data, cfg));
    CHECK(json.find("stopped_reason") != std::string::npos);
    CHECK(json.find("final_edges") != std::string::npos);
    CHECK(stop_reason_name(StopReason::max_iterations) == "max-iterations");
    CHECK(stop_reason_name(StopReason::edge_count_non_decreasing) ==
          "edge-count-non-decreasing");
}
