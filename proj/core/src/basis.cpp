#include "sing/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sing/errors.hpp"

namespace sing {

namespace {

void enumerate_rec(int slot, int remaining, std::vector<int>& cur,
                   std::vector<MultiIndex>& out) {
    if (slot == static_cast<int>(cur.size())) {
        out.push_back(MultiIndex{cur});
        return;
    }
    for (int d = remaining; d >= 0; --d) {
        cur[slot] = d;
        enumerate_rec(slot + 1, remaining - d, cur, out);
    }
    cur[slot] = 0;
}

}  // namespace

BasisSet total_degree_set(const std::vector<int>& active_variables, int max_degree) {
    if (max_degree < 0) throw std::invalid_argument("total_degree_set: negative degree");
    for (std::size_t i = 0; i < active_variables.size(); ++i) {
        if (active_variables[i] < 1)
            throw std::invalid_argument("total_degree_set: variable ids are 1-based");
        if (i > 0 && active_variables[i] <= active_variables[i - 1])
            throw std::invalid_argument("total_degree_set: active variables must be strictly increasing");
    }
    BasisSet b;
    b.active_variables = active_variables;
    b.max_total_degree = max_degree;
    const int a = static_cast<int>(active_variables.size());
    if (a == 0) {
        b.indices.push_back(MultiIndex{{}});
        return b;
    }
    std::vector<int> cur(a, 0);
    for (int deg = 0; deg <= max_degree; ++deg) {
        // Exactly the indices of total degree == deg, first slot descending.
        std::vector<MultiIndex> level;
        enumerate_rec(0, deg, cur, level);
        for (auto& mi : level)
            if (mi.total_degree() == deg) b.indices.push_back(std::move(mi));
    }
    return b;
}

double hermite_element(int degree, double x, int order) {
    if (order < 0 || order > 2)
        throw UnsupportedDerivativeOrder("hermite_element: order " + std::to_string(order));
    if (degree == 0) return order == 0 ? 1.0 : 0.0;
    if (degree == 1) return order == 0 ? x : (order == 1 ? 1.0 : 0.0);

    // Probabilist Hermite values up to the requested degree.
    double h0 = 1.0, h1 = x;
    for (int m = 1; m < degree; ++m) {
        const double h2 = x * h1 - m * h0;
        h0 = h1;
        h1 = h2;
    }
    if (order == 0) return h1;
    if (order == 1) return degree * h0;  // H'_m = m H_{m-1}
    // H''_m = m (m-1) H_{m-2}
    double g0 = 1.0, g1 = x;
    for (int m = 1; m <= degree - 3; ++m) {
        const double g2 = x * g1 - m * g0;
        g0 = g1;
        g1 = g2;
    }
    const double hm2 = (degree == 2) ? 1.0 : g1;
    return double(degree) * (degree - 1) * hm2;
}

void hermite_element_table(double x, int max_degree, double* value, double* d1, double* d2) {
    const int n = max_degree;
    std::vector<double> h(n + 1);
    h[0] = 1.0;
    if (n >= 1) h[1] = x;
    for (int m = 1; m < n; ++m) h[m + 1] = x * h[m] - m * h[m - 1];
    for (int m = 0; m <= n; ++m) {
        value[m] = h[m];
        d1[m] = (m >= 1) ? m * h[m - 1] : 0.0;
        d2[m] = (m >= 2) ? double(m) * (m - 1) * h[m - 2] : 0.0;
    }
}

Vector eval_basis_local(const BasisSet& b, const Vector& point_active,
                        const std::vector<int>& orders_active) {
    const std::size_t a = b.active_variables.size();
    if (point_active.size() < a)
        throw DimensionMismatch("eval_basis_local: point does not cover active variables");
    for (int o : orders_active)
        if (o < 0 || o > 2)
            throw UnsupportedDerivativeOrder("eval_basis_local: order " + std::to_string(o));

    // Per-slot univariate tables.
    const int maxdeg = b.max_total_degree;
    std::vector<std::vector<double>> val(a), d1(a), d2(a);
    for (std::size_t s = 0; s < a; ++s) {
        val[s].resize(maxdeg + 1);
        d1[s].resize(maxdeg + 1);
        d2[s].resize(maxdeg + 1);
        hermite_element_table(point_active[s], maxdeg, val[s].data(), d1[s].data(), d2[s].data());
    }
    Vector out(b.indices.size());
    for (std::size_t m = 0; m < b.indices.size(); ++m) {
        double prod = 1.0;
        const auto& degs = b.indices[m].degrees;
        for (std::size_t s = 0; s < a; ++s) {
            const int order = s < orders_active.size() ? orders_active[s] : 0;
            const double f = order == 0   ? val[s][degs[s]]
                             : order == 1 ? d1[s][degs[s]]
                                          : d2[s][degs[s]];
            prod *= f;
        }
        out[m] = prod;
    }
    return out;
}

Vector eval_basis(const BasisSet& b, const Vector& point,
                  const std::map<int, int>& derivative_orders) {
    for (const auto& [v, o] : derivative_orders)
        if (o < 0 || o > 2)
            throw UnsupportedDerivativeOrder("eval_basis: order " + std::to_string(o) +
                                             " for variable " + std::to_string(v));
    Vector local(b.active_variables.size());
    std::vector<int> orders(b.active_variables.size(), 0);
    for (std::size_t s = 0; s < b.active_variables.size(); ++s) {
        const int v = b.active_variables[s];
        if (static_cast<std::size_t>(v) > point.size())
            throw DimensionMismatch("eval_basis: point does not cover active variable " +
                                    std::to_string(v));
        local[s] = point[v - 1];
        auto it = derivative_orders.find(v);
        if (it != derivative_orders.end()) orders[s] = it->second;
    }
    // Every element is constant in variables outside the active set, so a
    // positive derivative order there zeroes the whole evaluation.
    for (const auto& [v, o] : derivative_orders) {
        if (o == 0) continue;
        if (!std::binary_search(b.active_variables.begin(), b.active_variables.end(), v))
            return Vector(b.indices.size(), 0.0);
    }
    return eval_basis_local(b, local, orders);
}

}  // namespace sing
