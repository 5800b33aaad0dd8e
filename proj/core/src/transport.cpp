#include "sing/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "sing/errors.hpp"
#include "transport_detail.hpp"

namespace sing {

void SparsityPattern::add(int j, int k) {
    if (j < 1 || j >= k) throw std::invalid_argument("SparsityPattern: pairs need 1 <= j < k");
    pairs.insert({j, k});
}

std::size_t TriangularMap::coefficient_count() const {
    std::size_t p = 0;
    for (const auto& mc : components) p += mc.coefficient_count();
    return p;
}

TriangularMap make_triangular_map(int d, const SparsityPattern& pattern, int degree,
                                  int quadrature_order, double epsilon) {
    if (d < 1) throw std::invalid_argument("make_triangular_map: dimension must be >= 1");
    if (degree < 1) throw std::invalid_argument("make_triangular_map: degree must be >= 1");
    for (const auto& [j, k] : pattern.pairs)
        if (k > d) throw std::invalid_argument("make_triangular_map: pattern pair beyond dimension");

    TriangularMap map;
    map.dimension = d;
    map.sparsity = pattern;
    map.quadrature_order = quadrature_order;
    map.epsilon = epsilon;
    map.components.reserve(d);
    for (int k = 1; k <= d; ++k) {
        MapComponent mc;
        mc.index = k;
        std::vector<int> active;
        for (int j = 1; j < k; ++j)
            if (!pattern.contains(j, k)) active.push_back(j);
        mc.c_basis = total_degree_set(active, degree);
        std::vector<int> active_h = active;
        active_h.push_back(k);
        mc.h_basis = total_degree_set(active_h, degree - 1);
        mc.c_coeffs.assign(mc.c_basis.size(), 0.0);
        mc.h_coeffs.assign(mc.h_basis.size(), 0.0);
        mc.h_coeffs[0] = 1.0;  // constant index is first; starts near the identity map
        map.components.push_back(std::move(mc));
    }
    return map;
}

TriangularMap make_identity_map(int d, int quadrature_order, double epsilon) {
    SparsityPattern full;
    for (int k = 2; k <= d; ++k)
        for (int j = 1; j < k; ++j) full.add(j, k);
    TriangularMap map = make_triangular_map(d, full, 1, quadrature_order, epsilon);
    for (auto& mc : map.components) mc.h_coeffs[0] = std::sqrt(1.0 - epsilon);
    return map;
}

TriangularMap make_affine_map(const Matrix& lower, const Vector& shift, int quadrature_order,
                              double epsilon) {
    const int d = static_cast<int>(lower.rows);
    if (lower.cols != lower.rows || shift.size() != lower.rows)
        throw DimensionMismatch("make_affine_map: dimension mismatch");
    TriangularMap map = make_triangular_map(d, SparsityPattern{}, 1, quadrature_order, epsilon);
    for (int k = 1; k <= d; ++k) {
        MapComponent& mc = map.components[k - 1];
        const double diag = lower(k - 1, k - 1);
        if (!(diag > epsilon))
            throw std::invalid_argument("make_affine_map: diagonal entries must exceed epsilon");
        double c0 = 0.0;
        for (int j = 1; j <= k; ++j) c0 -= lower(k - 1, j - 1) * shift[j - 1];
        // c basis ordering: constant first, then the linear terms in variable order.
        mc.c_coeffs.assign(mc.c_basis.size(), 0.0);
        mc.c_coeffs[0] = c0;
        for (std::size_t m = 0; m < mc.c_basis.indices.size(); ++m) {
            const auto& degs = mc.c_basis.indices[m].degrees;
            if (mc.c_basis.indices[m].total_degree() != 1) continue;
            for (std::size_t s = 0; s < degs.size(); ++s)
                if (degs[s] == 1)
                    mc.c_coeffs[m] = lower(k - 1, mc.c_basis.active_variables[s] - 1);
        }
        mc.h_coeffs[0] = std::sqrt(diag - epsilon);
    }
    return map;
}

Vector get_coefficients(const TriangularMap& map) {
    Vector out;
    out.reserve(map.coefficient_count());
    for (const auto& mc : map.components) {
        out.insert(out.end(), mc.c_coeffs.begin(), mc.c_coeffs.end());
        out.insert(out.end(), mc.h_coeffs.begin(), mc.h_coeffs.end());
    }
    return out;
}

void set_coefficients(TriangularMap& map, const Vector& coeffs) {
    if (coeffs.size() != map.coefficient_count())
        throw DimensionMismatch("set_coefficients: wrong coefficient count");
    std::size_t pos = 0;
    for (auto& mc : map.components) {
        std::copy(coeffs.begin() + pos, coeffs.begin() + pos + mc.c_coeffs.size(),
                  mc.c_coeffs.begin());
        pos += mc.c_coeffs.size();
        std::copy(coeffs.begin() + pos, coeffs.begin() + pos + mc.h_coeffs.size(),
                  mc.h_coeffs.begin());
        pos += mc.h_coeffs.size();
    }
}

double eval_component(const MapComponent& mc, const Vector& z, int quadrature_order,
                      double epsilon) {
    if (z.size() < static_cast<std::size_t>(mc.index))
        throw DimensionMismatch("eval_component: point has fewer entries than the component index");
    detail::ComponentEval ce = detail::ComponentEval::build(mc, quadrature_order, epsilon);
    detail::ComponentWorkspace ws;
    ws.prepare(ce);
    detail::compute_atoms(ce, z, 0, false, ws);
    return ws.atoms.S;
}

double partial_k(const MapComponent& mc, const Vector& z, double epsilon) {
    if (z.size() < static_cast<std::size_t>(mc.index))
        throw DimensionMismatch("partial_k: point has fewer entries than the component index");
    detail::ComponentEval ce = detail::ComponentEval::build(mc, 1, epsilon);
    detail::ComponentWorkspace ws;
    ws.prepare(ce);
    for (int s = 0; s < ce.na; ++s) ws.tables.fill(s, z[ce.active[s] - 1]);
    ws.tables.fill(ce.t_slot, z[ce.k - 1]);
    const double hd = detail::combo_eval(ce.cb_h, ws.tables, mc.h_coeffs.data(), nullptr, nullptr);
    return detail::g_of(hd, epsilon);
}

double eval_component(const TriangularMap& map, int k, const Vector& z) {
    return eval_component(map.components.at(k - 1), z, map.quadrature_order, map.epsilon);
}

double partial_k(const TriangularMap& map, int k, const Vector& z) {
    return partial_k(map.components.at(k - 1), z, map.epsilon);
}

Vector eval_map(const TriangularMap& map, const Vector& z) {
    if (z.size() != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("eval_map: point dimension mismatch");
    Vector out(map.dimension);
    for (int k = 1; k <= map.dimension; ++k) out[k - 1] = eval_component(map, k, z);
    return out;
}

double log_pullback(const TriangularMap& map, const Vector& z) {
    if (z.size() != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("log_pullback: point dimension mismatch");
    double total = -0.5 * map.dimension * std::log(2.0 * M_PI);
    detail::ComponentWorkspace ws;
    for (const auto& mc : map.components) {
        detail::ComponentEval ce =
            detail::ComponentEval::build(mc, map.quadrature_order, map.epsilon);
        ws.prepare(ce);
        detail::compute_atoms(ce, z, 0, false, ws);
        total += -0.5 * ws.atoms.S * ws.atoms.S + ws.atoms.L;
    }
    return total;
}

double mixed_log_hessian(const TriangularMap& map, const Vector& z, int i, int j) {
    if (i == j) throw std::invalid_argument("mixed_log_hessian: needs i != j");
    if (i > j) std::swap(i, j);
    if (j > map.dimension) throw DimensionMismatch("mixed_log_hessian: index beyond dimension");
    double total = 0.0;
    detail::ComponentWorkspace ws;
    for (int k = j; k <= map.dimension; ++k) {
        const MapComponent& mc = map.components[k - 1];
        detail::ComponentEval ce =
            detail::ComponentEval::build(mc, map.quadrature_order, map.epsilon);
        const int si = ce.slot_of(i);
        const int sj = ce.slot_of(j);
        if (si < 0 || sj < 0) continue;
        ws.prepare(ce);
        detail::compute_atoms(ce, z, 2, false, ws);
        total += detail::xi_pair(ce, ws, si, sj);
    }
    return total;
}

Vector coeff_gradient_log_pullback(const TriangularMap& map, const Vector& z) {
    if (z.size() != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("coeff_gradient_log_pullback: point dimension mismatch");
    Vector grad(map.coefficient_count(), 0.0);
    std::size_t pos = 0;
    detail::ComponentWorkspace ws;
    for (const auto& mc : map.components) {
        detail::ComponentEval ce =
            detail::ComponentEval::build(mc, map.quadrature_order, map.epsilon);
        ws.prepare(ce);
        detail::compute_atoms(ce, z, 0, true, ws);
        const detail::Atoms& a = ws.atoms;
        const double zk = z[ce.k - 1];

        // c block: d/dc_m (-S^2/2) = -S psi_m.
        detail::IndexProducts ip;
        ws.tables.fill(ce.t_slot, zk);
        for (std::size_t m = 0; m < ce.mc_size(); ++m) {
            detail::index_products(ce.cb_c, ws.tables, m, false, false, ip);
            grad[pos + m] = -a.S * ip.value;
        }
        // h block: -S dS/dh_m + (g'/g)(hd) phi_m.
        const std::size_t hoff = pos + ce.mc_size();
        for (std::size_t m = 0; m < ce.mh_size(); ++m) {
            detail::index_products(ce.cb_h, ws.tables, m, false, false, ip);
            grad[hoff + m] = a.r * ip.value;
        }
        const auto& quad = ce.quad;
        for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
            const double cq = 0.5 * (quad.nodes[q] + 1.0);
            const double w = quad.weights[q];
            ws.tables.fill(ce.t_slot, zk * cq);
            const double gpv = a.gphq[q];
            for (std::size_t m = 0; m < ce.mh_size(); ++m) {
                detail::index_products(ce.cb_h, ws.tables, m, false, false, ip);
                grad[hoff + m] += -a.S * 0.5 * zk * w * gpv * ip.value;
            }
        }
        pos += mc.coefficient_count();
    }
    return grad;
}

Vector invert(const TriangularMap& map, const Vector& x) {
    if (x.size() != static_cast<std::size_t>(map.dimension))
        throw DimensionMismatch("invert: point dimension mismatch");
    Vector z(map.dimension, 0.0);
    detail::ComponentWorkspace ws;
    for (int k = 1; k <= map.dimension; ++k) {
        const MapComponent& mc = map.components[k - 1];
        detail::ComponentEval ce =
            detail::ComponentEval::build(mc, map.quadrature_order, map.epsilon);
        ws.prepare(ce);
        auto eval_at = [&](double xi) {
            z[k - 1] = xi;
            detail::compute_atoms(ce, z, 0, false, ws);
            return ws.atoms.S;
        };
        const double target = x[k - 1];
        double lo = -1.0, hi = 1.0;
        double flo = eval_at(lo), fhi = eval_at(hi);
        int doublings = 0;
        while (flo > target) {
            lo *= 2.0;
            flo = eval_at(lo);
            if (++doublings > 200)
                throw NoConvergence("invert: bracket expansion failed for component " +
                                    std::to_string(k));
        }
        while (fhi < target) {
            hi *= 2.0;
            fhi = eval_at(hi);
            if (++doublings > 200)
                throw NoConvergence("invert: bracket expansion failed for component " +
                                    std::to_string(k));
        }
        // Bisection down to a tight interval, then Newton polish via d_k S^k.
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            const double fm = eval_at(mid);
            if (std::abs(fm - target) < 1e-12) break;
            if (fm < target)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
        }
        for (int it = 0; it < 4; ++it) {
            z[k - 1] = mid;
            const double fm = eval_at(mid);
            const double dk = partial_k(mc, z, map.epsilon);
            const double step = (fm - target) / dk;
            mid -= step;
            if (std::abs(step) < 1e-14) break;
        }
        z[k - 1] = mid;
    }
    return z;
}

std::string map_to_json(const TriangularMap& map) {
    nlohmann::json j;
    j["dimension"] = map.dimension;
    j["quadrature_order"] = map.quadrature_order;
    j["epsilon"] = map.epsilon;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : map.sparsity.pairs) pairs.push_back({a, b});
    j["sparsity"] = pairs;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& mc : map.components) {
        nlohmann::json c;
        c["index"] = mc.index;
        c["active_variables"] = mc.c_basis.active_variables;
        c["c_max_degree"] = mc.c_basis.max_total_degree;
        c["h_max_degree"] = mc.h_basis.max_total_degree;
        nlohmann::json cidx = nlohmann::json::array();
        for (const auto& mi : mc.c_basis.indices) cidx.push_back(mi.degrees);
        nlohmann::json hidx = nlohmann::json::array();
        for (const auto& mi : mc.h_basis.indices) hidx.push_back(mi.degrees);
        c["c_indices"] = cidx;
        c["h_indices"] = hidx;
        c["c_coeffs"] = mc.c_coeffs;
        c["h_coeffs"] = mc.h_coeffs;
        comps.push_back(c);
    }
    j["components"] = comps;
    return j.dump(2);
}

TriangularMap map_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TriangularMap map;
    map.dimension = j.at("dimension").get<int>();
    map.quadrature_order = j.at("quadrature_order").get<int>();
    map.epsilon = j.at("epsilon").get<double>();
    for (const auto& p : j.at("sparsity")) map.sparsity.add(p.at(0).get<int>(), p.at(1).get<int>());
    for (const auto& c : j.at("components")) {
        MapComponent mc;
        mc.index = c.at("index").get<int>();
        const auto active = c.at("active_variables").get<std::vector<int>>();
        mc.c_basis.active_variables = active;
        mc.c_basis.max_total_degree = c.at("c_max_degree").get<int>();
        for (const auto& degs : c.at("c_indices"))
            mc.c_basis.indices.push_back(MultiIndex{degs.get<std::vector<int>>()});
        std::vector<int> active_h = active;
        active_h.push_back(mc.index);
        mc.h_basis.active_variables = active_h;
        mc.h_basis.max_total_degree = c.at("h_max_degree").get<int>();
        for (const auto& degs : c.at("h_indices"))
            mc.h_basis.indices.push_back(MultiIndex{degs.get<std::vector<int>>()});
        mc.c_coeffs = c.at("c_coeffs").get<Vector>();
        mc.h_coeffs = c.at("h_coeffs").get<Vector>();
        if (mc.c_coeffs.size() != mc.c_basis.size() || mc.h_coeffs.size() != mc.h_basis.size())
            throw std::invalid_argument("map_from_json: coefficient count mismatch");
        map.components.push_back(std::move(mc));
    }
    return map;
}

}  // namespace sing
