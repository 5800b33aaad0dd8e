#include "sing/driver.hpp"

#include <cmath>
#include <string>

#include "json.hpp"
#include "sing/errors.hpp"

namespace sing {

std::pair<SampleMatrix, Standardization> standardize(const SampleMatrix& data) {
    Standardization st;
    st.mean.assign(data.d, 0.0);
    st.std.assign(data.d, 0.0);
    for (std::size_t l = 0; l < data.n; ++l)
        for (std::size_t j = 0; j < data.d; ++j) st.mean[j] += data(l, j);
    for (double& v : st.mean) v /= double(data.n);
    for (std::size_t l = 0; l < data.n; ++l)
        for (std::size_t j = 0; j < data.d; ++j) {
            const double c = data(l, j) - st.mean[j];
            st.std[j] += c * c;
        }
    for (std::size_t j = 0; j < data.d; ++j) {
        st.std[j] = std::sqrt(st.std[j] / double(data.n));
        if (st.std[j] < 1e-12)
            throw DegenerateColumn("standardize: column " + std::to_string(j + 1) +
                                   " has (near-)zero standard deviation");
    }
    SampleMatrix out(data.n, data.d);
    for (std::size_t l = 0; l < data.n; ++l)
        for (std::size_t j = 0; j < data.d; ++j)
            out(l, j) = (data(l, j) - st.mean[j]) / st.std[j];
    return {std::move(out), st};
}

namespace {

struct IterationResult {
    ScoreMatrix score;      // original labels
    Matrix tau;             // original labels
    UndirectedGraph edges;  // original labels
    double fit_objective = 0.0;
    std::vector<int> fit_iterations;
    std::vector<char> fit_converged;
};

// Fits in the permuted frame defined by ord (working column a holds original
// variable ord^{-1}(a)), then maps scores and edges back to original labels.
IterationResult run_iteration(const SampleMatrix& std_data, const Ordering& ord,
                              const SparsityPattern& pattern, const SingConfig& cfg) {
    const int d = static_cast<int>(std_data.d);
    const Ordering inv = ord.inverse();
    SampleMatrix work(std_data.n, std_data.d);
    for (std::size_t l = 0; l < std_data.n; ++l)
        for (int a = 1; a <= d; ++a) work(l, a - 1) = std_data(l, inv.apply(a) - 1);

    FitResult fit = fit_map(work, pattern, cfg.beta, cfg.quadrature_order, cfg.epsilon);
    const Matrix fisher = fisher_information(fit.map, work);
    const ScoreMatrix score_w = estimate_variances(fit.map, work, fisher);
    const ThresholdedScore thr = threshold(score_w, cfg.c, cfg.tau0);

    IterationResult out;
    out.score.d = d;
    out.score.n = score_w.n;
    out.score.omega = Matrix(d, d);
    out.score.variance = Matrix(d, d);
    out.tau = Matrix(d, d);
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            if (i == j) continue;
            const int a = ord.apply(i), b = ord.apply(j);
            out.score.omega(i - 1, j - 1) = score_w.omega(a - 1, b - 1);
            out.score.variance(i - 1, j - 1) = score_w.variance(a - 1, b - 1);
            out.tau(i - 1, j - 1) = thr.tau(a - 1, b - 1);
        }
    // Edge rule: the thresholded score must be nonzero, so pairs whose score
    // is exactly zero (structurally absent variables) never become edges even
    // when tau is zero too.
    out.edges = UndirectedGraph(d);
    for (const auto& [a, b] : thr.kept)
        if (score_w.omega_at(a, b) > 0.0) out.edges.add_edge(inv.apply(a), inv.apply(b));
    out.fit_objective = fit.objective;
    out.fit_iterations = fit.iterations;
    out.fit_converged = fit.converged;
    return out;
}

}  // namespace

std::pair<UndirectedGraph, ScoreMatrix> n_sing(const SampleMatrix& data, const SingConfig& cfg) {
    auto [std_data, st] = standardize(data);
    const int d = static_cast<int>(data.d);
    IterationResult res =
        run_iteration(std_data, Ordering::identity(d), SparsityPattern{}, cfg);
    return {res.edges, res.score};
}

SingReport run_sing(const SampleMatrix& data, const SingConfig& cfg) {
    if (cfg.beta < 1 || cfg.max_iterations < 1 || !(cfg.c > 0.0) || cfg.tau0 < 0.0)
        throw std::invalid_argument("run_sing: invalid configuration");
    auto [std_data, st] = standardize(data);
    const int d = static_cast<int>(data.d);

    SingReport report;
    report.config = cfg;
    report.standardization = st;

    Ordering ord = Ordering::identity(d);
    SparsityPattern pattern;  // first iteration is the dense triangular map
    for (int t = 1; t <= cfg.max_iterations; ++t) {
        IterationResult res = run_iteration(std_data, ord, pattern, cfg);

        SingIteration record;
        record.t = t;
        record.ordering = ord;
        record.pattern = pattern;
        record.score = res.score;
        record.tau = res.tau;
        record.edges = res.edges;
        record.edge_count = res.edges.edge_count();
        record.fit_objective = res.fit_objective;
        record.fit_iterations = res.fit_iterations;
        record.fit_converged = res.fit_converged;
        report.iterations.push_back(std::move(record));

        if (t >= 2) {
            const std::size_t prev = report.iterations[t - 2].edge_count;
            const std::size_t cur = report.iterations[t - 1].edge_count;
            if (cur >= prev) {
                // Strict increase hands back the previous estimate; a tie keeps
                // the current one.
                report.final_edges = cur > prev ? report.iterations[t - 2].edges
                                                : report.iterations[t - 1].edges;
                report.stopped_reason = StopReason::edge_count_non_decreasing;
                return report;
            }
        }
        if (t == cfg.max_iterations) {
            report.final_edges = report.iterations.back().edges;
            report.stopped_reason = StopReason::max_iterations;
            return report;
        }
        ord = reverse_cholesky_ordering(res.edges);
        pattern = sparsity_bound(relabel(res.edges, ord));
    }
    return report;  // unreachable
}

std::string stop_reason_name(StopReason reason) {
    return reason == StopReason::edge_count_non_decreasing ? "edge-count-non-decreasing"
                                                           : "max-iterations";
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string report_to_json(const SingReport& report) {
    nlohmann::json j;
    j["config"] = {{"beta", report.config.beta},
                   {"c", report.config.c},
                   {"tau0", report.config.tau0},
                   {"max_iterations", report.config.max_iterations},
                   {"quadrature_order", report.config.quadrature_order},
                   {"epsilon", report.config.epsilon},
                   {"seed", report.config.seed}};
    j["standardization"] = {{"mean", report.standardization.mean},
                            {"std", report.standardization.std}};
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& it : report.iterations) {
        nlohmann::json ji;
        ji["t"] = it.t;
        ji["ordering"] = it.ordering.perm;
        nlohmann::json pattern = nlohmann::json::array();
        for (const auto& [a, b] : it.pattern.pairs) pattern.push_back({a, b});
        ji["pattern"] = pattern;
        ji["omega"] = matrix_to_json(it.score.omega);
        ji["variance"] = matrix_to_json(it.score.variance);
        ji["tau"] = matrix_to_json(it.tau);
        ji["edges"] = nlohmann::json::parse(graph_to_json(it.edges));
        ji["edge_count"] = it.edge_count;
        ji["fit_objective"] = it.fit_objective;
        ji["fit_iterations"] = it.fit_iterations;
        nlohmann::json conv = nlohmann::json::array();
        for (char c : it.fit_converged) conv.push_back(c != 0);
        ji["fit_converged"] = conv;
        iters.push_back(ji);
    }
    j["iterations"] = iters;
    j["final_edges"] = nlohmann::json::parse(graph_to_json(report.final_edges));
    j["stopped_reason"] = stop_reason_name(report.stopped_reason);
    return j.dump(2);
}

}  // namespace sing
