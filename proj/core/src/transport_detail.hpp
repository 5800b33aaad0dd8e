#pragma once

// Internal evaluation machinery for triangular map components, shared by the
// transport, optimize and score translation units. Not part of the installed
// interface.
//
// Conventions: a component k has one ordered active set A = {j < k} of input
// variables. Slot s < |A| refers to A[s]; slot |A| (the "t slot") is the k-th
// variable, which doubles as the integration variable of the monotone part.
// All z-derivatives of the component value differentiate the quadrature
// discretization, so analytic derivatives match finite differences of the
// implemented map exactly; d_k of the log-term uses g(h(z)) directly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sing/basis.hpp"
#include "sing/errors.hpp"
#include "sing/quadrature.hpp"
#include "sing/transport.hpp"

namespace sing::detail {

constexpr int kMaxNz = 16;  // nonzero slots per multi-index (total degree caps this)

// Nonzero-entry form of a basis: per index, only the slots with positive degree.
struct CompactBasis {
    int n_slots = 0;
    int max_degree = 0;
    std::vector<int> offset;   // size() + 1 entries into nz arrays
    std::vector<int> nz_slot;
    std::vector<int> nz_deg;

    std::size_t size() const { return offset.empty() ? 0 : offset.size() - 1; }

    static CompactBasis build(const BasisSet& b, int n_slots) {
        CompactBasis cb;
        cb.n_slots = n_slots;
        cb.max_degree = b.max_total_degree;
        cb.offset.push_back(0);
        for (const auto& mi : b.indices) {
            for (std::size_t s = 0; s < mi.degrees.size(); ++s) {
                if (mi.degrees[s] > 0) {
                    cb.nz_slot.push_back(static_cast<int>(s));
                    cb.nz_deg.push_back(mi.degrees[s]);
                }
            }
            cb.offset.push_back(static_cast<int>(cb.nz_slot.size()));
        }
        return cb;
    }
};

// Univariate element tables (value, first, second derivative) per slot.
struct SlotTables {
    int n_slots = 0;
    int stride = 0;
    std::vector<double> v, d1, d2;

    void init(int slots, int max_degree) {
        n_slots = slots;
        stride = max_degree + 1;
        v.assign(std::size_t(slots) * stride, 0.0);
        d1.assign(std::size_t(slots) * stride, 0.0);
        d2.assign(std::size_t(slots) * stride, 0.0);
    }
    void fill(int slot, double x) {
        hermite_element_table(x, stride - 1, v.data() + std::size_t(slot) * stride,
                              d1.data() + std::size_t(slot) * stride,
                              d2.data() + std::size_t(slot) * stride);
    }
    double val(int slot, int deg) const { return v[std::size_t(slot) * stride + deg]; }
    double der1(int slot, int deg) const { return d1[std::size_t(slot) * stride + deg]; }
    double der2(int slot, int deg) const { return d2[std::size_t(slot) * stride + deg]; }
};

// Tensor products for one index: value, first-derivative products per nonzero
// slot, and mixed second-derivative products per nonzero slot pair.
struct IndexProducts {
    double value = 1.0;
    int nnz = 0;
    int slot[kMaxNz];
    double grad[kMaxNz];
    double hess[kMaxNz * (kMaxNz - 1) / 2];  // pair (a,b), a<b at position a*(2n-a-1)/2... filled linearly

    int pair_count() const { return nnz * (nnz - 1) / 2; }
};

// want_hess implies want_grad.
inline void index_products(const CompactBasis& cb, const SlotTables& t, std::size_t m,
                           bool want_grad, bool want_hess, IndexProducts& out) {
    const int b = cb.offset[m];
    const int e = cb.offset[m + 1];
    const int nnz = e - b;
    out.nnz = nnz;
    double vals[kMaxNz], ders[kMaxNz];
    double prod = 1.0;
    for (int i = 0; i < nnz; ++i) {
        const int s = cb.nz_slot[b + i];
        const int d = cb.nz_deg[b + i];
        out.slot[i] = s;
        vals[i] = t.val(s, d);
        if (want_grad || want_hess) ders[i] = t.der1(s, d);
        prod *= vals[i];
    }
    out.value = prod;
    if (!want_grad && !want_hess) return;
    for (int i = 0; i < nnz; ++i) {
        double g = ders[i];
        for (int j = 0; j < nnz; ++j)
            if (j != i) g *= vals[j];
        out.grad[i] = g;
    }
    if (!want_hess) return;
    int p = 0;
    for (int i = 0; i < nnz; ++i)
        for (int j = i + 1; j < nnz; ++j) {
            double hprod = ders[i] * ders[j];
            for (int l = 0; l < nnz; ++l)
                if (l != i && l != j) hprod *= vals[l];
            out.hess[p++] = hprod;
        }
}

// Linear-combination value/gradient/hessian over slots at the tabled point.
// grad has n_slots entries, hess is a dense symmetric n_slots x n_slots array
// (row-major); pass nullptr for what is not needed.
inline double combo_eval(const CompactBasis& cb, const SlotTables& t, const double* coef,
                         double* grad, double* hess) {
    const int ns = cb.n_slots;
    if (grad) std::fill(grad, grad + ns, 0.0);
    if (hess) std::fill(hess, hess + std::size_t(ns) * ns, 0.0);
    double value = 0.0;
    IndexProducts ip;
    for (std::size_t m = 0; m < cb.size(); ++m) {
        index_products(cb, t, m, grad != nullptr, hess != nullptr, ip);
        const double c = coef[m];
        value += c * ip.value;
        if (grad)
            for (int i = 0; i < ip.nnz; ++i) grad[ip.slot[i]] += c * ip.grad[i];
        if (hess) {
            int p = 0;
            for (int i = 0; i < ip.nnz; ++i)
                for (int j = i + 1; j < ip.nnz; ++j) {
                    const int a = ip.slot[i], b2 = ip.slot[j];
                    hess[std::size_t(a) * ns + b2] += c * ip.hess[p];
                    hess[std::size_t(b2) * ns + a] += c * ip.hess[p];
                    ++p;
                }
        }
    }
    return value;
}

inline void basis_values(const CompactBasis& cb, const SlotTables& t, double* out) {
    IndexProducts ip;
    for (std::size_t m = 0; m < cb.size(); ++m) {
        index_products(cb, t, m, false, false, ip);
        out[m] = ip.value;
    }
}

// One component prepared for evaluation.
struct ComponentEval {
    const MapComponent* mc = nullptr;
    int k = 1;             // 1-based component index
    int na = 0;            // number of active variables below k
    int ns = 0;            // na + 1 slots, t slot last
    int t_slot = 0;
    std::vector<int> active;  // 1-based variable ids
    CompactBasis cb_c;
    CompactBasis cb_h;
    int max_degree = 1;    // max univariate degree across both bases
    QuadratureRule quad;   // effective rule (reduced when the integrand is polynomial)
    double eps = 1e-8;

    std::size_t mc_size() const { return cb_c.size(); }
    std::size_t mh_size() const { return cb_h.size(); }

    // Slot of a 1-based global variable id, or -1 when the component does not
    // depend on it.
    int slot_of(int var) const {
        if (var == k) return t_slot;
        auto it = std::lower_bound(active.begin(), active.end(), var);
        if (it == active.end() || *it != var) return -1;
        return static_cast<int>(it - active.begin());
    }

    static ComponentEval build(const MapComponent& mc, int quadrature_order, double eps) {
        ComponentEval ce;
        ce.mc = &mc;
        ce.k = mc.index;
        ce.active = mc.c_basis.active_variables;
        ce.na = static_cast<int>(ce.active.size());
        ce.ns = ce.na + 1;
        ce.t_slot = ce.na;
        ce.eps = eps;
        // Both bases share the component's slot space (c never touches the t
        // slot) so gradient and hessian strides line up.
        ce.cb_c = CompactBasis::build(mc.c_basis, ce.ns);
        ce.cb_h = CompactBasis::build(mc.h_basis, ce.ns);
        ce.max_degree = std::max(mc.c_basis.max_total_degree, mc.h_basis.max_total_degree);
        // The basis elements are polynomials, so g(h) is a polynomial in the
        // integration variable of degree twice h's t-degree; the configured
        // order is only an upper bound on the exact rule.
        int t_deg = 0;
        const auto& hb = mc.h_basis;
        const int tpos = static_cast<int>(hb.active_variables.size()) - 1;
        for (const auto& mi : hb.indices)
            if (tpos >= 0) t_deg = std::max(t_deg, mi.degrees[tpos]);
        const int order = std::min(quadrature_order, t_deg + 1);
        ce.quad = gauss_legendre(std::max(1, order));
        return ce;
    }
};

inline double g_of(double h, double eps) { return h * h + eps; }
inline double gp_of(double h) { return 2.0 * h; }

// Scalar atoms of one component at one point. Slot-indexed arrays follow the
// component's slot layout; d2 arrays are dense symmetric ns x ns.
struct Atoms {
    double S = 0.0;        // component value (quadrature form)
    double cval = 0.0;
    double hd = 0.0;       // h at the point itself
    double L = 0.0;        // log g(hd)
    double r = 0.0;        // g'/g at hd
    double rp = 0.0;       // d/dh of r at hd
    std::vector<double> dS, d2S;
    std::vector<double> dhd, d2hd;
    // Node caches (filled when keep_nodes): per node hq, g'(hq), dhq, d2hq.
    std::vector<double> hq, gphq;
    std::vector<double> dhq;   // q * ns
    std::vector<double> d2hq;  // q * ns * ns
};

struct ComponentWorkspace {
    SlotTables tables;
    Atoms atoms;
    std::vector<double> cgrad, chess;
    // Scratch for the node loop.
    std::vector<double> iu, iuv, iut, hgrad, hhess;

    void prepare(const ComponentEval& ce) {
        tables.init(ce.ns, ce.max_degree);
        const std::size_t ns = ce.ns;
        atoms.dS.assign(ns, 0.0);
        atoms.d2S.assign(ns * ns, 0.0);
        atoms.dhd.assign(ns, 0.0);
        atoms.d2hd.assign(ns * ns, 0.0);
        cgrad.assign(ns, 0.0);
        chess.assign(ns * ns, 0.0);
        iu.assign(ns, 0.0);
        iuv.assign(ns * ns, 0.0);
        iut.assign(ns, 0.0);
        hgrad.assign(ns, 0.0);
        hhess.assign(ns * ns, 0.0);
    }
};

// Computes the atoms at z (full d-vector). Levels: 0 value only, 1 adds first
// derivatives, 2 adds mixed seconds. keep_nodes retains per-node quantities
// for coefficient-gradient passes.
inline void compute_atoms(const ComponentEval& ce, const Vector& z, int level, bool keep_nodes,
                          ComponentWorkspace& ws) {
    const double* ccoef = ce.mc->c_coeffs.data();
    const double* hcoef = ce.mc->h_coeffs.data();
    const int ns = ce.ns;
    const int tslot = ce.t_slot;
    Atoms& a = ws.atoms;

    for (int s = 0; s < ce.na; ++s) ws.tables.fill(s, z[ce.active[s] - 1]);
    const double zk = z[ce.k - 1];
    ws.tables.fill(tslot, zk);

    const bool grads = level >= 1;
    const bool hesses = level >= 2;

    // Diagonal point: c and h at z itself.
    a.cval = combo_eval(ce.cb_c, ws.tables, ccoef, grads ? ws.cgrad.data() : nullptr,
                        hesses ? ws.chess.data() : nullptr);
    a.hd = combo_eval(ce.cb_h, ws.tables, hcoef, grads ? a.dhd.data() : nullptr,
                      hesses ? a.d2hd.data() : nullptr);
    const double g = g_of(a.hd, ce.eps);
    a.L = std::log(g);
    a.r = gp_of(a.hd) / g;
    a.rp = 2.0 * (ce.eps - a.hd * a.hd) / (g * g);

    // Quadrature nodes t_q = zk (x_q + 1) / 2.
    const auto& quad = ce.quad;
    const int nq = static_cast<int>(quad.nodes.size());
    if (keep_nodes) {
        a.hq.assign(nq, 0.0);
        a.gphq.assign(nq, 0.0);
        a.dhq.assign(std::size_t(nq) * ns, 0.0);
        a.d2hq.assign(hesses ? std::size_t(nq) * ns * ns : 0, 0.0);
    }

    // Node-sum accumulators; the final assembly multiplies the integral parts
    // by zk/2 (the Jacobian of rescaling [-1,1] to [0, zk]).
    double i0 = 0.0;  // sum w g
    double it = 0.0;  // sum w g' dh[t] cq
    auto& iu = ws.iu;    // sum w g' dh[u], u < na
    auto& iuv = ws.iuv;  // sum w (2 dh[u] dh[v] + g' d2h[u][v])
    auto& iut = ws.iut;  // sum w cq (2 dh[t] dh[u] + g' d2h[u][t])
    auto& hgrad = ws.hgrad;
    auto& hhess = ws.hhess;
    std::fill(iu.begin(), iu.end(), 0.0);
    if (hesses) {
        std::fill(iuv.begin(), iuv.end(), 0.0);
        std::fill(iut.begin(), iut.end(), 0.0);
    }

    for (int q = 0; q < nq; ++q) {
        const double cq = 0.5 * (quad.nodes[q] + 1.0);
        const double w = quad.weights[q];
        ws.tables.fill(tslot, zk * cq);
        const double hv = combo_eval(ce.cb_h, ws.tables, hcoef, grads ? hgrad.data() : nullptr,
                                     hesses ? hhess.data() : nullptr);
        const double gv = g_of(hv, ce.eps);
        const double gpv = gp_of(hv);
        i0 += w * gv;
        if (keep_nodes) {
            a.hq[q] = hv;
            a.gphq[q] = gpv;
            if (grads)
                std::copy(hgrad.begin(), hgrad.end(), a.dhq.begin() + std::size_t(q) * ns);
            if (hesses && !a.d2hq.empty())
                std::copy(hhess.begin(), hhess.end(), a.d2hq.begin() + std::size_t(q) * ns * ns);
        }
        if (grads) {
            for (int u = 0; u < ce.na; ++u) iu[u] += w * gpv * hgrad[u];
            it += w * gpv * hgrad[tslot] * cq;
            if (hesses) {
                for (int u = 0; u < ce.na; ++u) {
                    for (int v = u + 1; v < ce.na; ++v)
                        iuv[std::size_t(u) * ns + v] +=
                            w * (2.0 * hgrad[u] * hgrad[v] + gpv * hhess[std::size_t(u) * ns + v]);
                    iut[u] += w * cq *
                              (2.0 * hgrad[tslot] * hgrad[u] +
                               gpv * hhess[std::size_t(u) * ns + tslot]);
                }
            }
        }
    }

    const double half_zk = 0.5 * zk;
    a.S = a.cval + half_zk * i0;
    if (grads) {
        for (int u = 0; u < ce.na; ++u) a.dS[u] = ws.cgrad[u] + half_zk * iu[u];
        a.dS[tslot] = 0.5 * i0 + half_zk * it;
        if (hesses) {
            std::fill(a.d2S.begin(), a.d2S.end(), 0.0);
            for (int u = 0; u < ce.na; ++u) {
                for (int v = u + 1; v < ce.na; ++v) {
                    const double val = ws.chess[std::size_t(u) * ns + v] +
                                       half_zk * iuv[std::size_t(u) * ns + v];
                    a.d2S[std::size_t(u) * ns + v] = val;
                    a.d2S[std::size_t(v) * ns + u] = val;
                }
                const double val = 0.5 * iu[u] + half_zk * iut[u];
                a.d2S[std::size_t(u) * ns + tslot] = val;
                a.d2S[std::size_t(tslot) * ns + u] = val;
            }
        }
    }
}

// Contribution of this component to d_i d_j log-pullback, for slots (si, sj)
// of the component (si != sj, both valid). Requires atoms at level 2.
inline double xi_pair(const ComponentEval& ce, const ComponentWorkspace& ws, int si, int sj) {
    const Atoms& a = ws.atoms;
    const int ns = ce.ns;
    const double d2s = a.d2S[std::size_t(si) * ns + sj];
    const double d2h = a.d2hd[std::size_t(si) * ns + sj];
    return -a.dS[si] * a.dS[sj] - a.S * d2s + a.rp * a.dhd[si] * a.dhd[sj] + a.r * d2h;
}

// One score pair restricted to a component: slots and the caller's pair id.
struct PairSlots {
    int si = -1;
    int sj = -1;
    int pair_id = 0;
};

// Node-sum primitives and product caches used by the coefficient-gradient
// pass; indexed layouts are documented field by field. Sized for one component
// and reused across samples.
struct VarianceScratch {
    int mh = 0, mc = 0, ns = 0, nzcap = 0, nzpaircap = 0;

    // Dense per-h-index primitives over quadrature nodes.
    std::vector<double> b0, b0c, btc;  // mh
    std::vector<double> bu;            // ns * mh   (sum w phi dh[u])
    std::vector<double> duv;           // ns*ns * mh (sum w phi d2h[u][v], u<v<na)
    std::vector<double> dut;           // ns * mh   (sum w phi d2h[u][t] cq)
    // Nonzero-slot-restricted primitives.
    std::vector<double> ge, gec;       // mh * nzcap
    std::vector<double> cuv, cuvc;     // mh * nzcap * ns
    std::vector<double> hp, hpc;       // mh * nzpaircap
    // Product caches at the point itself.
    std::vector<IndexProducts> c_prod, hd_prod;

    void prepare(const ComponentEval& ce) {
        mh = static_cast<int>(ce.mh_size());
        mc = static_cast<int>(ce.mc_size());
        ns = ce.ns;
        nzcap = 0;
        for (std::size_t m = 0; m < ce.cb_h.size(); ++m)
            nzcap = std::max(nzcap, ce.cb_h.offset[m + 1] - ce.cb_h.offset[m]);
        nzpaircap = nzcap * (nzcap - 1) / 2;
        b0.assign(mh, 0.0);
        b0c.assign(mh, 0.0);
        btc.assign(mh, 0.0);
        bu.assign(std::size_t(ns) * mh, 0.0);
        duv.assign(std::size_t(ns) * ns * mh, 0.0);
        dut.assign(std::size_t(ns) * mh, 0.0);
        ge.assign(std::size_t(mh) * std::max(1, nzcap), 0.0);
        gec.assign(ge.size(), 0.0);
        cuv.assign(std::size_t(mh) * std::max(1, nzcap) * ns, 0.0);
        cuvc.assign(cuv.size(), 0.0);
        hp.assign(std::size_t(mh) * std::max(1, nzpaircap), 0.0);
        hpc.assign(hp.size(), 0.0);
        c_prod.resize(mc);
        hd_prod.resize(mh);
    }
};

// Builds the node-sum primitives and diag-point product caches after
// compute_atoms(level 2, keep_nodes = true) ran at the same z.
inline void build_variance_primitives(const ComponentEval& ce, ComponentWorkspace& ws,
                                      const Vector& z, VarianceScratch& vs) {
    const Atoms& a = ws.atoms;
    const int ns = ce.ns;
    const int na = ce.na;
    const int tslot = ce.t_slot;
    const int mh = vs.mh;
    const double zk = z[ce.k - 1];

    std::fill(vs.b0.begin(), vs.b0.end(), 0.0);
    std::fill(vs.b0c.begin(), vs.b0c.end(), 0.0);
    std::fill(vs.btc.begin(), vs.btc.end(), 0.0);
    std::fill(vs.bu.begin(), vs.bu.end(), 0.0);
    std::fill(vs.duv.begin(), vs.duv.end(), 0.0);
    std::fill(vs.dut.begin(), vs.dut.end(), 0.0);
    std::fill(vs.ge.begin(), vs.ge.end(), 0.0);
    std::fill(vs.gec.begin(), vs.gec.end(), 0.0);
    std::fill(vs.cuv.begin(), vs.cuv.end(), 0.0);
    std::fill(vs.cuvc.begin(), vs.cuvc.end(), 0.0);
    std::fill(vs.hp.begin(), vs.hp.end(), 0.0);
    std::fill(vs.hpc.begin(), vs.hpc.end(), 0.0);

    const auto& quad = ce.quad;
    const int nq = static_cast<int>(quad.nodes.size());
    IndexProducts ip;
    for (int q = 0; q < nq; ++q) {
        const double cq = 0.5 * (quad.nodes[q] + 1.0);
        const double w = quad.weights[q];
        ws.tables.fill(tslot, zk * cq);
        const double gpv = a.gphq[q];
        const double* dh = a.dhq.data() + std::size_t(q) * ns;
        const double* d2h = a.d2hq.data() + std::size_t(q) * ns * ns;
        for (int m = 0; m < mh; ++m) {
            index_products(ce.cb_h, ws.tables, m, true, true, ip);
            const double val = ip.value;
            vs.b0[m] += w * gpv * val;
            vs.b0c[m] += w * gpv * val * cq;
            vs.btc[m] += w * val * dh[tslot] * cq;
            double* buRow = vs.bu.data() + std::size_t(m) * ns;
            double* dutRow = vs.dut.data() + std::size_t(m) * ns;
            double* duvRow = vs.duv.data() + std::size_t(m) * ns * ns;
            for (int u = 0; u < ns; ++u) buRow[u] += w * val * dh[u];
            for (int u = 0; u < na; ++u) {
                dutRow[u] += w * val * d2h[std::size_t(u) * ns + tslot] * cq;
                for (int v = u + 1; v < na; ++v)
                    duvRow[std::size_t(u) * ns + v] += w * val * d2h[std::size_t(u) * ns + v];
            }
            for (int e = 0; e < ip.nnz; ++e) {
                const double gp = ip.grad[e];
                vs.ge[std::size_t(m) * vs.nzcap + e] += w * gpv * gp;
                vs.gec[std::size_t(m) * vs.nzcap + e] += w * gpv * gp * cq;
                double* cRow = vs.cuv.data() + (std::size_t(m) * vs.nzcap + e) * ns;
                double* ccRow = vs.cuvc.data() + (std::size_t(m) * vs.nzcap + e) * ns;
                for (int v = 0; v < ns; ++v) {
                    cRow[v] += w * gp * dh[v];
                    ccRow[v] += w * gp * dh[v] * cq;
                }
            }
            const int np = ip.pair_count();
            for (int p = 0; p < np; ++p) {
                vs.hp[std::size_t(m) * std::max(1, vs.nzpaircap) + p] += w * gpv * ip.hess[p];
                vs.hpc[std::size_t(m) * std::max(1, vs.nzpaircap) + p] += w * gpv * ip.hess[p] * cq;
            }
        }
    }

    // Product caches at the point itself (t slot back to zk).
    ws.tables.fill(tslot, zk);
    for (int m = 0; m < vs.mc; ++m)
        index_products(ce.cb_c, ws.tables, m, true, true, vs.c_prod[m]);
    for (int m = 0; m < mh; ++m) index_products(ce.cb_h, ws.tables, m, true, true, vs.hd_prod[m]);
}

// Finds the nz entry index of slot s in ip, or -1.
inline int nz_entry_of(const IndexProducts& ip, int s) {
    for (int e = 0; e < ip.nnz; ++e)
        if (ip.slot[e] == s) return e;
    return -1;
}

// Pair position within the hess array of ip for nz entries (ea < eb).
inline int nz_pair_pos(const IndexProducts& ip, int ea, int eb) {
    const int n = ip.nnz;
    return ea * (2 * n - ea - 1) / 2 + (eb - ea - 1);
}

// Accumulates weight * d(xi(si, sj))/d(alpha_k) into the caller's rows (layout
// c coefficients then h coefficients). Requires compute_atoms(level 2, keep
// nodes) followed by build_variance_primitives at the same point.
inline void accumulate_xi_coeff_gradient(const ComponentEval& ce, const ComponentWorkspace& ws,
                                         const VarianceScratch& vs, const Vector& z, int si,
                                         int sj, double weight, double* row) {
    const Atoms& a = ws.atoms;
    const int ns = ce.ns;
    const int tslot = ce.t_slot;
    const double zk = z[ce.k - 1];
    const double hzk = 0.5 * zk;
    const double dSi = a.dS[si];
    const double dSj = a.dS[sj];
    const double d2Sij = a.d2S[std::size_t(si) * ns + sj];
    const double g = g_of(a.hd, ce.eps);
    const double rpp = -4.0 * a.hd * (3.0 * ce.eps - a.hd * a.hd) / (g * g * g);

    // c coefficients: the component value is linear in them.
    for (int m = 0; m < vs.mc; ++m) {
        const IndexProducts& ip = vs.c_prod[m];
        const int ei = nz_entry_of(ip, si);
        const int ej = nz_entry_of(ip, sj);
        const double gi = ei >= 0 ? ip.grad[ei] : 0.0;
        const double gj = ej >= 0 ? ip.grad[ej] : 0.0;
        double hij = 0.0;
        if (ei >= 0 && ej >= 0)
            hij = ip.hess[nz_pair_pos(ip, std::min(ei, ej), std::max(ei, ej))];
        row[m] += weight * (-gi * dSj - dSi * gj - ip.value * d2Sij - a.S * hij);
    }

    double* hrow = row + vs.mc;
    const int nzc = std::max(1, vs.nzcap);
    const int nzp = std::max(1, vs.nzpaircap);
    for (int m = 0; m < vs.mh; ++m) {
        const IndexProducts& hd = vs.hd_prod[m];
        const int ei = nz_entry_of(hd, si);
        const int ej = nz_entry_of(hd, sj);
        const double pdi = ei >= 0 ? hd.grad[ei] : 0.0;
        const double pdj = ej >= 0 ? hd.grad[ej] : 0.0;
        double pdij = 0.0;
        if (ei >= 0 && ej >= 0)
            pdij = hd.hess[nz_pair_pos(hd, std::min(ei, ej), std::max(ei, ej))];
        const double d2hdij = a.d2hd[std::size_t(si) * ns + sj];
        // log-term: d/dh_m of rp dh[si] dh[sj] + r d2h[si][sj] at the point.
        const double dL = rpp * hd.value * a.dhd[si] * a.dhd[sj] +
                          a.rp * (pdi * a.dhd[sj] + a.dhd[si] * pdj) +
                          a.rp * hd.value * d2hdij + a.r * pdij;

        const double dmS = hzk * vs.b0[m];
        const double* buRow = vs.bu.data() + std::size_t(m) * ns;

        auto ge_at = [&](int slot) -> double {
            // first-derivative products only exist on nz slots
            const IndexProducts& ref = vs.hd_prod[m];  // nz layout identical at nodes
            const int e = nz_entry_of(ref, slot);
            return e >= 0 ? vs.ge[std::size_t(m) * nzc + e] : 0.0;
        };
        auto gec_at = [&](int slot) -> double {
            const int e = nz_entry_of(vs.hd_prod[m], slot);
            return e >= 0 ? vs.gec[std::size_t(m) * nzc + e] : 0.0;
        };
        auto cuv_at = [&](int eslot, int v, bool with_cq) -> double {
            const int e = nz_entry_of(vs.hd_prod[m], eslot);
            if (e < 0) return 0.0;
            const auto& arr = with_cq ? vs.cuvc : vs.cuv;
            return arr[(std::size_t(m) * nzc + e) * ns + v];
        };
        auto hp_at = [&](int u, int v, bool with_cq) -> double {
            const IndexProducts& ref = vs.hd_prod[m];
            const int eu = nz_entry_of(ref, u);
            const int ev = nz_entry_of(ref, v);
            if (eu < 0 || ev < 0) return 0.0;
            const int p = nz_pair_pos(ref, std::min(eu, ev), std::max(eu, ev));
            const auto& arr = with_cq ? vs.hpc : vs.hp;
            return arr[std::size_t(m) * nzp + p];
        };

        double dmdSi, dmdSj, dmd2S;
        if (sj != tslot) {
            dmdSi = hzk * (2.0 * buRow[si] + ge_at(si));
            dmdSj = hzk * (2.0 * buRow[sj] + ge_at(sj));
            dmd2S = hzk * (2.0 * (cuv_at(si, sj, false) + cuv_at(sj, si, false)) +
                           2.0 * vs.duv[(std::size_t(m) * ns + si) * ns + sj] + hp_at(si, sj, false));
        } else {
            dmdSi = hzk * (2.0 * buRow[si] + ge_at(si));
            dmdSj = 0.5 * vs.b0[m] + hzk * (2.0 * vs.btc[m] + gec_at(tslot));
            dmd2S = 0.5 * (2.0 * buRow[si] + ge_at(si)) +
                    hzk * (2.0 * (cuv_at(tslot, si, true) + cuv_at(si, tslot, true)) +
                           2.0 * vs.dut[std::size_t(m) * ns + si] + hp_at(si, tslot, true));
        }
        hrow[m] += weight * (-dmdSi * dSj - dSi * dmdSj - dmS * d2Sij - a.S * dmd2S + dL);
    }
}

}  // namespace sing::detail
