#include "sing/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "parallel.hpp"
#include "sing/errors.hpp"
#include "transport_detail.hpp"

namespace sing {

namespace {

constexpr std::size_t kBlock = 1024;  // fixed sample block; merge order is block order

// Linear index of the pair (i, j) with 1 <= i < j <= d.
struct PairIndexer {
    int d = 0;
    int count() const { return d * (d - 1) / 2; }
    int id(int i, int j) const { return (i - 1) * d - (i - 1) * i / 2 + (j - i - 1); }
};

struct ComponentPairs {
    detail::ComponentEval ce;
    std::vector<detail::PairSlots> pairs;  // slot pairs with global pair ids
};

std::vector<ComponentPairs> build_evals(const TriangularMap& map, const PairIndexer& px) {
    std::vector<ComponentPairs> evals;
    evals.reserve(map.components.size());
    for (const auto& mcomp : map.components) {
        ComponentPairs cp;
        cp.ce = detail::ComponentEval::build(mcomp, map.quadrature_order, map.epsilon);
        std::vector<int> vars = cp.ce.active;
        vars.push_back(cp.ce.k);
        for (std::size_t a = 0; a < vars.size(); ++a)
            for (std::size_t b = a + 1; b < vars.size(); ++b)
                cp.pairs.push_back({static_cast<int>(a), static_cast<int>(b),
                                    px.id(vars[a], vars[b])});
        evals.push_back(std::move(cp));
    }
    return evals;
}

// Fills xi[l * P + pair] = d_i d_j log-pullback at sample l.
void compute_xi(const std::vector<ComponentPairs>& evals, const SampleMatrix& data,
                const PairIndexer& px, Vector& xi) {
    const std::size_t n = data.n;
    const std::size_t P = px.count();
    xi.assign(n * P, 0.0);
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    detail::parallel_for(nblocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        detail::ComponentWorkspace ws;
        Vector z(data.d);
        for (std::size_t l = lo; l < hi; ++l) {
            std::copy(data.row(l), data.row(l) + data.d, z.begin());
            for (const auto& cp : evals) {
                if (cp.pairs.empty()) continue;
                ws.prepare(cp.ce);
                detail::compute_atoms(cp.ce, z, 2, false, ws);
                for (const auto& pr : cp.pairs)
                    xi[l * P + pr.pair_id] += detail::xi_pair(cp.ce, ws, pr.si, pr.sj);
            }
        }
    });
}

ScoreMatrix omega_from_xi(const Vector& xi, const PairIndexer& px, std::size_t n) {
    ScoreMatrix score;
    score.d = px.d;
    score.n = n;
    score.omega = Matrix(px.d, px.d);
    score.variance = Matrix(px.d, px.d);
    const std::size_t P = px.count();
    for (int i = 1; i <= px.d; ++i)
        for (int j = i + 1; j <= px.d; ++j) {
            const int pid = px.id(i, j);
            double s = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                const double v = xi[l * P + pid];
                s += v * v;
            }
            const double w = s / double(n);
            score.omega(i - 1, j - 1) = w;
            score.omega(j - 1, i - 1) = w;
        }
    return score;
}

}  // namespace

ScoreMatrix estimate_score(const TriangularMap& map, const SampleMatrix& data) {
    if (data.d != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("estimate_score: data dimension mismatch");
    PairIndexer px{map.dimension};
    const auto evals = build_evals(map, px);
    Vector xi;
    compute_xi(evals, data, px, xi);
    return omega_from_xi(xi, px, data.n);
}

namespace {

// grad_alpha Omega(i,j) = (2/n) sum_l xi_l(i,j) d xi_l(i,j) / d alpha,
// accumulated per fixed-size sample block and merged in block order.
Matrix score_gradients_impl(const std::vector<ComponentPairs>& evals, const SampleMatrix& data,
                            const PairIndexer& px, const Vector& xi, std::size_t p,
                            const std::vector<std::size_t>& offsets) {
    const std::size_t P = px.count();
    const std::size_t n = data.n;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<Vector> block_grad(nblocks);
    detail::parallel_for(nblocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        Vector& grad = block_grad[b];
        grad.assign(P * p, 0.0);
        detail::ComponentWorkspace ws;
        std::vector<detail::VarianceScratch> scratch(evals.size());
        Vector z(data.d);
        const double scale = 2.0 / double(n);
        for (std::size_t l = lo; l < hi; ++l) {
            std::copy(data.row(l), data.row(l) + data.d, z.begin());
            for (std::size_t kidx = 0; kidx < evals.size(); ++kidx) {
                const auto& cp = evals[kidx];
                if (cp.pairs.empty()) continue;
                ws.prepare(cp.ce);
                detail::compute_atoms(cp.ce, z, 2, true, ws);
                scratch[kidx].prepare(cp.ce);
                detail::build_variance_primitives(cp.ce, ws, z, scratch[kidx]);
                for (const auto& pr : cp.pairs) {
                    const double w = scale * xi[l * P + pr.pair_id];
                    if (w == 0.0) continue;
                    detail::accumulate_xi_coeff_gradient(
                        cp.ce, ws, scratch[kidx], z, pr.si, pr.sj, w,
                        grad.data() + std::size_t(pr.pair_id) * p + offsets[kidx]);
                }
            }
        }
    });
    Matrix grad(P, p);
    for (std::size_t b = 0; b < nblocks; ++b)
        for (std::size_t i = 0; i < P * p; ++i) grad.data[i] += block_grad[b][i];
    return grad;
}

std::vector<std::size_t> coefficient_offsets(const TriangularMap& map) {
    std::vector<std::size_t> offsets(map.components.size());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < map.components.size(); ++k) {
        offsets[k] = pos;
        pos += map.components[k].coefficient_count();
    }
    return offsets;
}

}  // namespace

Matrix score_gradients(const TriangularMap& map, const SampleMatrix& data) {
    if (data.d != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("score_gradients: data dimension mismatch");
    PairIndexer px{map.dimension};
    const auto evals = build_evals(map, px);
    Vector xi;
    compute_xi(evals, data, px, xi);
    return score_gradients_impl(evals, data, px, xi, map.coefficient_count(),
                                coefficient_offsets(map));
}

ScoreMatrix estimate_variances(const TriangularMap& map, const SampleMatrix& data,
                               const Matrix& fisher) {
    if (data.d != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("estimate_variances: data dimension mismatch");
    const std::size_t p = map.coefficient_count();
    if (fisher.rows != p || fisher.cols != p)
        throw DimensionMismatch("estimate_variances: fisher dimension mismatch");

    PairIndexer px{map.dimension};
    const auto evals = build_evals(map, px);
    Vector xi;
    compute_xi(evals, data, px, xi);
    ScoreMatrix score = omega_from_xi(xi, px, data.n);
    const Matrix grad = score_gradients_impl(evals, data, px, xi, p, coefficient_offsets(map));

    const CholeskyFactor factor = cholesky_factor(fisher);
    Vector row(p), y;
    for (int i = 1; i <= px.d; ++i)
        for (int j = i + 1; j <= px.d; ++j) {
            const int pid = px.id(i, j);
            std::copy(grad.data.begin() + std::size_t(pid) * p,
                      grad.data.begin() + std::size_t(pid + 1) * p, row.begin());
            y = factor.forward(row);
            const double v2 = dot(y, y);
            score.variance(i - 1, j - 1) = v2;
            score.variance(j - 1, i - 1) = v2;
        }
    return score;
}

ThresholdedScore threshold(const ScoreMatrix& score, double c, double tau0) {
    if (score.n < 2) throw InsufficientData("threshold: needs n >= 2");
    if (!(c > 0.0)) throw std::invalid_argument("threshold: c must be positive");
    if (tau0 < 0.0) throw std::invalid_argument("threshold: tau0 must be non-negative");

    ThresholdedScore out;
    out.base = score;
    out.f_constant = c;
    out.tau0 = tau0;
    out.tau = Matrix(score.d, score.d);
    const double f = c * std::sqrt(std::log(double(score.n)));
    const double sqrt_n = std::sqrt(double(score.n));
    for (int i = 1; i <= score.d; ++i)
        for (int j = i + 1; j <= score.d; ++j) {
            const double upsilon = std::sqrt(std::max(0.0, score.variance_at(i, j)));
            const double t = tau0 + f * upsilon / sqrt_n;
            out.tau(i - 1, j - 1) = t;
            out.tau(j - 1, i - 1) = t;
            if (score.omega_at(i, j) >= t) out.kept.push_back({i, j});
        }
    return out;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_matrix_csv: cannot open " + path);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            std::fprintf(f, j + 1 == m.cols ? "%.17g\n" : "%.17g,", m(i, j));
    std::fclose(f);
}

std::string threshold_to_json(const ThresholdedScore& t) {
    nlohmann::json j;
    j["n"] = t.base.n;
    j["c"] = t.f_constant;
    j["tau0"] = t.tau0;
    nlohmann::json kept = nlohmann::json::array();
    for (const auto& [a, b] : t.kept) kept.push_back({a, b});
    j["kept_edges"] = kept;
    return j.dump(2);
}

}  // namespace sing
