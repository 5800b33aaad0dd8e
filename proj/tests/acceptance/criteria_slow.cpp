#include <cmath>

#include "acceptance.hpp"
#include "sing/datasets.hpp"
#include "sing/driver.hpp"
#include "sing/experiment.hpp"
#include "sing/graph.hpp"
#include "sing/optimize.hpp"

namespace acceptance {

namespace {

using namespace sing;

// Criterion 3: the butterfly pairs need a cubic map; the affine map sees
// nothing at all.
std::string criterion3() {
    SingConfig cubic_cfg;
    cubic_cfg.beta = 3;
    int exact = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto [data, truth] = gen_butterfly(5, 2000, RngStream{4503, std::uint64_t(trial) + 1});
        SingReport report = run_sing(data, cubic_cfg);
        if (report.final_edges == truth) ++exact;
    }
    require(exact >= 13, "degree-3 run exact in only " + str(exact) + "/25 trials");

    SingConfig affine_cfg;
    affine_cfg.beta = 1;
    int empty = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto [data, truth] = gen_butterfly(5, 2000, RngStream{4503, std::uint64_t(trial) + 1});
        SingReport report = run_sing(data, affine_cfg);
        if (report.final_edges.edge_count() == 0) ++empty;
    }
    require(empty >= 24, "degree-1 run empty in only " + str(empty) + "/25 trials");
    return "degree 3 exact in " + str(exact) + "/25, degree 1 empty in " + str(empty) + "/25";
}

// Criterion 5: the cubed Gaussian chain. The analytic moment matrix matches
// the reference precision, brute-force Monte Carlo validates the moment
// identity, and the degree-1 driver keeps the chain at moderate n but admits
// the spurious (1,3) edge at very large n.
std::string criterion5() {
    const Matrix prec = gen_cubic(2, RngStream{1, 0}).gaussian_approx_precision;
    const double reference[3][3] = {{5.96e-2, 6.99e-3, -5.56e-4},
                                    {6.99e-3, 5.36e-2, 6.99e-3},
                                    {-5.56e-4, 6.99e-3, 5.96e-2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            require(std::abs(prec(i, j) - reference[i][j]) <= 5e-3 * std::abs(reference[i][j]),
                    "analytic precision (" + str(i + 1) + "," + str(j + 1) + ") = " +
                        str(prec(i, j)));

    // Monte Carlo moment oracle at n = 1e6: within 2 percent where that is
    // resolvable, within three standard errors where the entry is too small
    // for a 2 percent band at this sample size.
    const Matrix target = cubic_gaussian_approx_covariance();
    CubicDataset mc = gen_cubic(1000000, RngStream{4505, 1});
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double mean = 0.0, sq = 0.0;
            for (std::size_t l = 0; l < mc.samples.n; ++l) {
                const double v = mc.samples(l, i) * mc.samples(l, j);
                mean += v;
                sq += v * v;
            }
            mean /= double(mc.samples.n);
            const double var = sq / double(mc.samples.n) - mean * mean;
            const double se = std::sqrt(var / double(mc.samples.n));
            const double tol = std::max(0.02 * std::abs(target(i, j)), 3.0 * se);
            require(std::abs(mean - target(i, j)) <= tol,
                    "moment (" + str(i + 1) + "," + str(j + 1) + "): " + str(mean) + " vs " +
                        str(target(i, j)) + " tol " + str(tol));
        }

    // Moderate n recovers the chain.
    SingConfig cfg;
    cfg.beta = 1;
    {
        CubicDataset ds = gen_cubic(10000, RngStream{4505, 2});
        SingReport report = run_sing(ds.samples, cfg);
        require(report.final_edges == ds.truth,
                "chain not recovered at n = 1e4: " + str(report.final_edges.edge_count()) +
                    " edges");
    }
    // Very large n resolves the small spurious entry of the Gaussian
    // approximation: the (1,3) edge appears in at least one seeded run.
    int spurious = 0;
    bool chain_kept = true;
    for (int trial = 0; trial < 3; ++trial) {
        CubicDataset ds = gen_cubic(1000000, RngStream{4505, std::uint64_t(trial) + 3});
        SingReport report = run_sing(ds.samples, cfg);
        if (report.final_edges.has_edge(1, 3)) ++spurious;
        chain_kept = chain_kept && report.final_edges.has_edge(1, 2) &&
                     report.final_edges.has_edge(2, 3);
    }
    require(chain_kept, "true chain edges lost at n = 1e6");
    require(spurious >= 1, "the (1,3) edge never appeared at n = 1e6");
    return "reference precision matched; moments validated; spurious edge in " + str(spurious) +
           "/3 large-n runs";
}

// Criterion 7: nonparanormal random graph with the CDF marginal transform.
std::string criterion7() {
    ExperimentConfig cfg;
    cfg.family = "nonparanormal-cdf";
    cfg.parameters = {{"d", 10.0}, {"s", 3.0}, {"max_degree", 4.0}};
    cfg.sing.beta = 1;
    cfg.sing.seed = 4507;
    cfg.trials = 25;
    cfg.n_values = {500, 1500, 3000};
    TrialSummary summary = run_trials(cfg);
    require(summary.rows.size() == 3, "expected three sample sizes");
    for (const auto& row : summary.rows) {
        require(row.failures == 0, "trial failures at n = " + str(row.n));
        require(row.mean_type1 < 0.5,
                "mean type-1 " + str(row.mean_type1) + " at n = " + str(row.n));
    }
    require(summary.rows[0].mean_type2 > summary.rows[1].mean_type2 &&
                summary.rows[1].mean_type2 > summary.rows[2].mean_type2,
            "mean type-2 not strictly decreasing: " + str(summary.rows[0].mean_type2) + ", " +
                str(summary.rows[1].mean_type2) + ", " + str(summary.rows[2].mean_type2));
    return "type-1 means " + str(summary.rows[0].mean_type1) + "/" +
           str(summary.rows[1].mean_type1) + "/" + str(summary.rows[2].mean_type1) +
           "; type-2 means " + str(summary.rows[0].mean_type2) + " > " +
           str(summary.rows[1].mean_type2) + " > " + str(summary.rows[2].mean_type2);
}

// Criterion 9: the star target needs degree 2; degree 1 misreads it.
std::string criterion9() {
    SingConfig quad_cfg;
    quad_cfg.beta = 2;
    int exact = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto [data, truth] = gen_star_beta2(5, 10000, RngStream{4509, std::uint64_t(trial) + 1});
        SingReport report = run_sing(data, quad_cfg);
        if (report.final_edges == truth) ++exact;
    }
    require(exact >= 13, "degree-2 run exact in only " + str(exact) + "/25 trials");

    SingConfig affine_cfg;
    affine_cfg.beta = 1;
    int wrong = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto [data, truth] = gen_star_beta2(5, 10000, RngStream{4509, std::uint64_t(trial) + 1});
        SingReport report = run_sing(data, affine_cfg);
        const auto [t1, t2] = edge_errors(truth, report.final_edges);
        if (t1 + t2 >= 1) ++wrong;
    }
    require(wrong >= 13, "degree-1 run wrong in only " + str(wrong) + "/25 trials");
    return "degree 2 exact in " + str(exact) + "/25, degree 1 wrong in " + str(wrong) + "/25";
}

// Criterion 10: Lorenz-96 invariant distribution. Degree 2 with the constant
// threshold offset finds the periodic band; degree 1 misses the immediate
// neighbors.
std::string criterion10() {
    Lorenz96Params params;  // d=15, F=8, dt=0.01, t_end=1600, stride 40, burn-in 1000
    SampleMatrix traj = lorenz96_trajectory(params, RngStream{4510, 1});
    require(traj.n >= 3000, "trajectory too short: " + str(traj.n));
    double maxabs = 0.0;
    for (double v : traj.values) maxabs = std::max(maxabs, std::abs(v));
    require(maxabs < 25.0, "trajectory unbounded: " + str(maxabs));
    SampleMatrix data(3000, traj.d);
    std::copy(traj.values.begin(), traj.values.begin() + 3000 * traj.d, data.values.begin());

    auto circ_dist = [](int i, int j, int d) {
        const int raw = std::abs(i - j);
        return std::min(raw, d - raw);
    };

    SingConfig cfg;
    cfg.beta = 2;
    cfg.tau0 = 0.1;
    SingReport report = run_sing(data, cfg);
    int dist1_present = 0;
    for (const auto& [a, b] : report.final_edges.edges)
        require(circ_dist(a, b, 15) <= 3, "edge (" + str(a) + "," + str(b) +
                                              ") beyond circular distance 3");
    for (int v = 1; v <= 15; ++v) {
        const int next = v == 15 ? 1 : v + 1;
        if (report.final_edges.has_edge(v, next)) ++dist1_present;
    }
    require(dist1_present == 15, "only " + str(dist1_present) + "/15 immediate-neighbor edges");

    SingConfig affine_cfg;
    affine_cfg.beta = 1;
    affine_cfg.tau0 = 0.1;
    SingReport affine = run_sing(data, affine_cfg);
    int missing = 0;
    for (int v = 1; v <= 15; ++v) {
        const int next = v == 15 ? 1 : v + 1;
        if (!affine.final_edges.has_edge(v, next)) ++missing;
    }
    require(missing >= 10,
            "degree-1 run misses only " + str(missing) + "/15 immediate-neighbor edges");
    return "degree-2 band within distance 3 with all 15 immediate neighbors; degree 1 misses " +
           str(missing) + "/15";
}

}  // namespace

std::vector<Criterion> slow_criteria() {
    return {
        {3, "butterfly pairs", criterion3},
        {5, "cubic transformation of the Gaussian chain", criterion5},
        {7, "nonparanormal random graph, CDF marginals", criterion7},
        {9, "star target from a quadratic base map", criterion9},
        {10, "Lorenz-96 invariant distribution", criterion10},
    };
}

}  // namespace acceptance
