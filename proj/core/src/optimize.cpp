#include "sing/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "parallel.hpp"
#include "sing/errors.hpp"
#include "transport_detail.hpp"

namespace sing {

Vector empirical_mean(const SampleMatrix& data) {
    Vector m(data.d, 0.0);
    for (std::size_t l = 0; l < data.n; ++l)
        for (std::size_t j = 0; j < data.d; ++j) m[j] += data(l, j);
    for (double& v : m) v /= double(data.n);
    return m;
}

Matrix empirical_covariance(const SampleMatrix& data) {
    const Vector m = empirical_mean(data);
    Matrix cov(data.d, data.d);
    Vector centered(data.d);
    for (std::size_t l = 0; l < data.n; ++l) {
        for (std::size_t j = 0; j < data.d; ++j) centered[j] = data(l, j) - m[j];
        for (std::size_t i = 0; i < data.d; ++i)
            for (std::size_t j = i; j < data.d; ++j) cov(i, j) += centered[i] * centered[j];
    }
    for (std::size_t i = 0; i < data.d; ++i)
        for (std::size_t j = i; j < data.d; ++j) {
            cov(i, j) /= double(data.n);
            cov(j, i) = cov(i, j);
        }
    return cov;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Basis values frozen at the samples and quadrature nodes; each objective or
// gradient evaluation is then a handful of dense matrix-vector products.
struct ComponentCache {
    detail::ComponentEval ce;
    std::size_t n = 0, mc = 0, mh = 0, nq = 0;
    Vector zk;       // n
    Vector psi;      // n x mc
    Vector phid;     // n x mh
    Vector nodephi;  // n x nq x mh
    Vector wq, cq;   // per node weight and (x+1)/2

    void build(const MapComponent& proto, const SampleMatrix& data, int quad_order, double eps) {
        ce = detail::ComponentEval::build(proto, quad_order, eps);
        n = data.n;
        mc = ce.mc_size();
        mh = ce.mh_size();
        nq = ce.quad.nodes.size();
        zk.resize(n);
        psi.resize(n * mc);
        phid.resize(n * mh);
        nodephi.resize(n * nq * mh);
        wq.resize(nq);
        cq.resize(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            wq[q] = ce.quad.weights[q];
            cq[q] = 0.5 * (ce.quad.nodes[q] + 1.0);
        }
        detail::SlotTables tables;
        tables.init(ce.ns, ce.max_degree);
        for (std::size_t l = 0; l < n; ++l) {
            for (int s = 0; s < ce.na; ++s) tables.fill(s, data(l, ce.active[s] - 1));
            const double z = data(l, ce.k - 1);
            zk[l] = z;
            tables.fill(ce.t_slot, z);
            detail::basis_values(ce.cb_c, tables, psi.data() + l * mc);
            detail::basis_values(ce.cb_h, tables, phid.data() + l * mh);
            for (std::size_t q = 0; q < nq; ++q) {
                tables.fill(ce.t_slot, z * cq[q]);
                detail::basis_values(ce.cb_h, tables, nodephi.data() + (l * nq + q) * mh);
            }
        }
    }

    // Average negative log-likelihood share (without the log 2 pi constant)
    // and its gradient; grad may be null.
    double objective(const double* coef, double* grad) const {
        const double* c = coef;
        const double* h = coef + mc;
        const double eps = ce.eps;
        if (grad) std::fill(grad, grad + mc + mh, 0.0);
        double f = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const double* psirow = psi.data() + l * mc;
            const double* phidrow = phid.data() + l * mh;
            double cv = 0.0;
            for (std::size_t m = 0; m < mc; ++m) cv += psirow[m] * c[m];
            double hd = 0.0;
            for (std::size_t m = 0; m < mh; ++m) hd += phidrow[m] * h[m];
            const double gd = hd * hd + eps;

            double i0 = 0.0;
            const double* noderow = nodephi.data() + l * nq * mh;
            double hq[256];
            for (std::size_t q = 0; q < nq; ++q) {
                const double* phiq = noderow + q * mh;
                double hv = 0.0;
                for (std::size_t m = 0; m < mh; ++m) hv += phiq[m] * h[m];
                hq[q] = hv;
                i0 += wq[q] * (hv * hv + eps);
            }
            const double s = cv + 0.5 * zk[l] * i0;
            f += 0.5 * s * s - std::log(gd);
            if (grad) {
                double* gc = grad;
                double* gh = grad + mc;
                for (std::size_t m = 0; m < mc; ++m) gc[m] += s * psirow[m];
                const double r = 2.0 * hd / gd;
                for (std::size_t m = 0; m < mh; ++m) gh[m] -= r * phidrow[m];
                const double szk = s * 0.5 * zk[l];
                for (std::size_t q = 0; q < nq; ++q) {
                    const double* phiq = noderow + q * mh;
                    const double u = szk * wq[q] * 2.0 * hq[q];
                    for (std::size_t m = 0; m < mh; ++m) gh[m] += u * phiq[m];
                }
            }
        }
        const double inv_n = 1.0 / double(n);
        f *= inv_n;
        if (grad)
            for (std::size_t m = 0; m < mc + mh; ++m) grad[m] *= inv_n;
        return f;
    }
};

struct BfgsOutcome {
    Vector x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

template <typename F>
BfgsOutcome bfgs_minimize(const F& fg, Vector x0, int max_iterations, double tol) {
    const std::size_t p = x0.size();
    Vector g(p), g_new(p), dir(p), x_new(p), s(p), y(p), hy(p);
    Matrix h_inv = Matrix::identity(p);
    double f = fg(x0.data(), g.data());

    BfgsOutcome out;
    out.x = x0;
    out.f = f;
    out.trace.push_back(f);
    Vector& x = x0;

    int it = 0;
    for (; it < max_iterations; ++it) {
        if (norm2(g) <= tol) {
            out.converged = true;
            break;
        }
        // dir = -H g
        for (std::size_t i = 0; i < p; ++i) {
            double v = 0.0;
            const double* row = h_inv.data.data() + i * p;
            for (std::size_t j = 0; j < p; ++j) v += row[j] * g[j];
            dir[i] = -v;
        }
        double slope = dot(dir, g);
        if (!(slope < 0.0)) {
            h_inv = Matrix::identity(p);
            for (std::size_t i = 0; i < p; ++i) dir[i] = -g[i];
            slope = dot(dir, g);
            if (!(slope < 0.0)) break;
        }
        // Backtracking line search with the sufficient-decrease condition.
        double step = 1.0;
        double f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < p; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = fg(x_new.data(), g_new.data());
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        for (std::size_t i = 0; i < p; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        const double ys = dot(y, s);
        if (ys > 1e-12 * norm2(y) * norm2(s)) {
            const double rho = 1.0 / ys;
            for (std::size_t i = 0; i < p; ++i) {
                double v = 0.0;
                const double* row = h_inv.data.data() + i * p;
                for (std::size_t j = 0; j < p; ++j) v += row[j] * y[j];
                hy[i] = v;
            }
            const double yhy = dot(y, hy);
            const double c2 = rho * rho * yhy + rho;
            for (std::size_t i = 0; i < p; ++i) {
                double* row = h_inv.data.data() + i * p;
                for (std::size_t j = 0; j < p; ++j)
                    row[j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + c2 * s[i] * s[j];
            }
        }
        x = x_new;
        f = f_new;
        g = g_new;
        out.x = x;
        out.f = f;
        out.trace.push_back(f);
    }
    out.iterations = it;
    if (!out.converged) out.converged = norm2(g) <= tol;
    return out;
}

}  // namespace

ComponentFit fit_component(const MapComponent& start, const SampleMatrix& data,
                           int quadrature_order, double epsilon, const FitOptions& opts) {
    if (data.d < static_cast<std::size_t>(start.index))
        throw DimensionMismatch("fit_component: data has fewer columns than the component index");
    ComponentCache cache;
    cache.build(start, data, quadrature_order, epsilon);
    if (cache.nq > 256) throw Error("fit_component: quadrature order above 256 is unsupported");

    Vector x0(cache.mc + cache.mh);
    std::copy(start.c_coeffs.begin(), start.c_coeffs.end(), x0.begin());
    std::copy(start.h_coeffs.begin(), start.h_coeffs.end(), x0.begin() + cache.mc);

    auto fg = [&cache](const double* coef, double* grad) { return cache.objective(coef, grad); };
    BfgsOutcome res = bfgs_minimize(fg, std::move(x0), opts.max_iterations, opts.gradient_tol);

    ComponentFit fit;
    fit.component = start;
    std::copy(res.x.begin(), res.x.begin() + cache.mc, fit.component.c_coeffs.begin());
    std::copy(res.x.begin() + cache.mc, res.x.end(), fit.component.h_coeffs.begin());
    fit.objective = res.f + 0.5 * kLog2Pi;
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    fit.underdetermined = data.n < cache.mc + cache.mh;
    fit.objective_trace = std::move(res.trace);
    for (double& v : fit.objective_trace) v += 0.5 * kLog2Pi;
    return fit;
}

FitResult fit_map(const SampleMatrix& data, const SparsityPattern& pattern, int degree,
                  int quadrature_order, double epsilon, const FitOptions& opts) {
    if (data.n < 2) throw std::invalid_argument("fit_map: need at least 2 samples");
    const int d = static_cast<int>(data.d);
    TriangularMap proto = make_triangular_map(d, pattern, degree, quadrature_order, epsilon);

    std::vector<ComponentFit> fits(d);
    detail::parallel_for(d, [&](std::size_t idx) {
        try {
            fits[idx] =
                fit_component(proto.components[idx], data, quadrature_order, epsilon, opts);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error("fit_map: component " + std::to_string(idx + 1) + ": " + e.what());
        }
    });

    FitResult out;
    out.map = std::move(proto);
    out.iterations.resize(d);
    out.converged.resize(d);
    out.underdetermined.resize(d);
    for (int k = 0; k < d; ++k) {
        out.map.components[k] = std::move(fits[k].component);
        out.objective += fits[k].objective;
        out.iterations[k] = fits[k].iterations;
        out.converged[k] = fits[k].converged ? 1 : 0;
        out.underdetermined[k] = fits[k].underdetermined ? 1 : 0;
    }
    return out;
}

FitResult fit_affine_closed_form(const SampleMatrix& data, int quadrature_order, double epsilon) {
    if (data.n < data.d)
        throw NotPositiveDefinite("fit_affine_closed_form: fewer samples than dimensions");
    const Vector mean = empirical_mean(data);
    const Matrix cov = empirical_covariance(data);
    const Matrix chol = cholesky(cov);  // throws NotPositiveDefinite when singular
    const Matrix lower = invert_lower_triangular(chol);

    FitResult out;
    out.map = make_affine_map(lower, mean, quadrature_order, epsilon);
    // Gaussian MLE objective: (d/2)(1 + log 2 pi) + (1/2) log det covariance.
    double logdet = 0.0;
    for (std::size_t i = 0; i < cov.rows; ++i) logdet += 2.0 * std::log(chol(i, i));
    out.objective = 0.5 * double(data.d) * (1.0 + kLog2Pi) + 0.5 * logdet;
    out.iterations.assign(data.d, 0);
    out.converged.assign(data.d, 1);
    out.underdetermined.assign(data.d, 0);
    return out;
}

std::string fit_result_to_json(const FitResult& fit) {
    nlohmann::json j;
    j["map"] = nlohmann::json::parse(map_to_json(fit.map));
    j["objective"] = fit.objective;
    j["iterations"] = fit.iterations;
    nlohmann::json conv = nlohmann::json::array(), und = nlohmann::json::array();
    for (char c : fit.converged) conv.push_back(c != 0);
    for (char c : fit.underdetermined) und.push_back(c != 0);
    j["converged"] = conv;
    j["underdetermined"] = und;
    return j.dump(2);
}

Matrix fisher_information(const TriangularMap& map, const SampleMatrix& data) {
    if (data.d != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("fisher_information: data dimension mismatch");
    if (data.n == 0) throw std::invalid_argument("fisher_information: empty data");
    const std::size_t p = map.coefficient_count();
    Matrix gamma(p, p);

    std::vector<std::size_t> offsets(map.components.size());
    {
        std::size_t pos = 0;
        for (std::size_t k = 0; k < map.components.size(); ++k) {
            offsets[k] = pos;
            pos += map.components[k].coefficient_count();
        }
    }

    detail::parallel_for(map.components.size(), [&](std::size_t kidx) {
        const MapComponent& mcomp = map.components[kidx];
        detail::ComponentEval ce =
            detail::ComponentEval::build(mcomp, map.quadrature_order, map.epsilon);
        const std::size_t mc = ce.mc_size(), mh = ce.mh_size();
        const std::size_t nq = ce.quad.nodes.size();
        const std::size_t blk = mc + mh;
        Matrix local(blk, blk);
        detail::SlotTables tables;
        tables.init(ce.ns, ce.max_degree);
        Vector psirow(mc), phidrow(mh), noderows(nq * mh), dhs(mh);
        const double eps = ce.eps;

        for (std::size_t l = 0; l < data.n; ++l) {
            for (int s = 0; s < ce.na; ++s) tables.fill(s, data(l, ce.active[s] - 1));
            const double zk = data(l, ce.k - 1);
            tables.fill(ce.t_slot, zk);
            detail::basis_values(ce.cb_c, tables, psirow.data());
            detail::basis_values(ce.cb_h, tables, phidrow.data());
            double hd = 0.0;
            for (std::size_t m = 0; m < mh; ++m) hd += phidrow[m] * mcomp.h_coeffs[m];
            const double gd = hd * hd + eps;
            const double rp = 2.0 * (eps - hd * hd) / (gd * gd);

            double i0 = 0.0;
            std::fill(dhs.begin(), dhs.end(), 0.0);
            for (std::size_t q = 0; q < nq; ++q) {
                const double cq = 0.5 * (ce.quad.nodes[q] + 1.0);
                tables.fill(ce.t_slot, zk * cq);
                double* phiq = noderows.data() + q * mh;
                detail::basis_values(ce.cb_h, tables, phiq);
                double hv = 0.0;
                for (std::size_t m = 0; m < mh; ++m) hv += phiq[m] * mcomp.h_coeffs[m];
                const double w = ce.quad.weights[q];
                i0 += w * (hv * hv + eps);
                const double u = 0.5 * zk * w * 2.0 * hv;
                for (std::size_t m = 0; m < mh; ++m) dhs[m] += u * phiq[m];
            }
            double cv = 0.0;
            for (std::size_t m = 0; m < mc; ++m) cv += psirow[m] * mcomp.c_coeffs[m];
            const double sval = cv + 0.5 * zk * i0;

            // -(d^2/da^2) [-S^2/2 + log g(hd)] = grad S grad S^T + S hess S - rp phid phid^T
            for (std::size_t i = 0; i < mc; ++i)
                for (std::size_t j = i; j < mc; ++j) local(i, j) += psirow[i] * psirow[j];
            for (std::size_t i = 0; i < mc; ++i)
                for (std::size_t j = 0; j < mh; ++j) local(i, mc + j) += psirow[i] * dhs[j];
            for (std::size_t i = 0; i < mh; ++i)
                for (std::size_t j = i; j < mh; ++j)
                    local(mc + i, mc + j) += dhs[i] * dhs[j] - rp * phidrow[i] * phidrow[j];
            // S * d2S/dh dh' accumulated as a weighted Gram over the nodes.
            for (std::size_t q = 0; q < nq; ++q) {
                const double w = ce.quad.weights[q] * sval * zk;  // includes g'' = 2 and zk/2
                if (w == 0.0) continue;
                const double* phiq = noderows.data() + q * mh;
                for (std::size_t i = 0; i < mh; ++i) {
                    const double wi = w * phiq[i];
                    for (std::size_t j = i; j < mh; ++j)
                        local(mc + i, mc + j) += wi * phiq[j];
                }
            }
        }
        const double inv_n = 1.0 / double(data.n);
        const std::size_t off = offsets[kidx];
        for (std::size_t i = 0; i < blk; ++i)
            for (std::size_t j = i; j < blk; ++j) {
                const double v = local(i, j) * inv_n;
                gamma(off + i, off + j) = v;
                gamma(off + j, off + i) = v;
            }
    });

    double trace = 0.0;
    for (std::size_t i = 0; i < p; ++i) trace += gamma(i, i);
    const double ridge = 1e-8 * trace / double(p);
    for (std::size_t i = 0; i < p; ++i) gamma(i, i) += ridge;
    return gamma;
}

}  // namespace sing
