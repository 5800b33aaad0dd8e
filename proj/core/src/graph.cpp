#include "sing/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sing/errors.hpp"

namespace sing {

void UndirectedGraph::add_edge(int i, int j) {
    if (i == j) throw std::invalid_argument("UndirectedGraph: self-loop");
    if (i < 1 || j < 1 || i > d || j > d)
        throw std::invalid_argument("UndirectedGraph: node index out of range");
    edges.insert({std::min(i, j), std::max(i, j)});
}

bool UndirectedGraph::has_edge(int i, int j) const {
    return edges.count({std::min(i, j), std::max(i, j)}) > 0;
}

std::vector<int> UndirectedGraph::degrees() const {
    std::vector<int> deg(d, 0);
    for (const auto& [a, b] : edges) {
        ++deg[a - 1];
        ++deg[b - 1];
    }
    return deg;
}

Ordering Ordering::identity(int d) {
    Ordering o;
    o.perm.resize(d);
    for (int v = 1; v <= d; ++v) o.perm[v - 1] = v;
    return o;
}

bool Ordering::is_valid() const {
    std::vector<char> seen(perm.size(), 0);
    for (int v : perm) {
        if (v < 1 || v > static_cast<int>(perm.size()) || seen[v - 1]) return false;
        seen[v - 1] = 1;
    }
    return true;
}

Ordering Ordering::inverse() const {
    Ordering inv;
    inv.perm.resize(perm.size());
    for (std::size_t v = 0; v < perm.size(); ++v) inv.perm[perm[v] - 1] = static_cast<int>(v + 1);
    return inv;
}

SparsityPattern sparsity_bound(const UndirectedGraph& g) {
    const int d = g.d;
    std::vector<char> adj(std::size_t(d) * d, 0);
    for (const auto& [a, b] : g.edges) {
        adj[std::size_t(a - 1) * d + (b - 1)] = 1;
        adj[std::size_t(b - 1) * d + (a - 1)] = 1;
    }
    SparsityPattern pattern;
    for (int k = d; k >= 2; --k) {
        // Neighbors of k among the remaining nodes 1..k-1.
        std::vector<int> nb;
        for (int j = 1; j < k; ++j) {
            if (adj[std::size_t(k - 1) * d + (j - 1)])
                nb.push_back(j);
            else
                pattern.add(j, k);
        }
        // Remove k and turn its neighborhood into a clique.
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                adj[std::size_t(nb[a] - 1) * d + (nb[b] - 1)] = 1;
                adj[std::size_t(nb[b] - 1) * d + (nb[a] - 1)] = 1;
            }
    }
    return pattern;
}

Ordering reverse_cholesky_ordering(const UndirectedGraph& g) {
    const int d = g.d;
    std::vector<char> adj(std::size_t(d) * d, 0);
    for (const auto& [a, b] : g.edges) {
        adj[std::size_t(a - 1) * d + (b - 1)] = 1;
        adj[std::size_t(b - 1) * d + (a - 1)] = 1;
    }
    std::vector<char> alive(d, 1);
    std::vector<int> deg(d, 0);
    for (int v = 0; v < d; ++v)
        for (int u = 0; u < d; ++u) deg[v] += adj[std::size_t(v) * d + u];

    Ordering order;
    order.perm.assign(d, 0);
    for (int m = 1; m <= d; ++m) {
        // Minimum degree among remaining nodes; the highest index wins ties so
        // that the empty graph yields the identity permutation after reversal.
        int pick = -1;
        for (int v = 0; v < d; ++v) {
            if (!alive[v]) continue;
            if (pick < 0 || deg[v] < deg[pick] || (deg[v] == deg[pick] && v > pick)) pick = v;
        }
        order.perm[pick] = d + 1 - m;
        alive[pick] = 0;
        std::vector<int> nb;
        for (int u = 0; u < d; ++u)
            if (alive[u] && adj[std::size_t(pick) * d + u]) {
                nb.push_back(u);
                --deg[u];
            }
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                if (!adj[std::size_t(nb[a]) * d + nb[b]]) {
                    adj[std::size_t(nb[a]) * d + nb[b]] = 1;
                    adj[std::size_t(nb[b]) * d + nb[a]] = 1;
                    ++deg[nb[a]];
                    ++deg[nb[b]];
                }
            }
    }
    return order;
}

UndirectedGraph relabel(const UndirectedGraph& g, const Ordering& o) {
    if (o.size() != g.d || !o.is_valid())
        throw std::invalid_argument("relabel: ordering does not match the graph");
    UndirectedGraph out(g.d);
    for (const auto& [a, b] : g.edges) out.add_edge(o.apply(a), o.apply(b));
    return out;
}

std::pair<int, int> edge_errors(const UndirectedGraph& truth, const UndirectedGraph& estimate) {
    if (truth.d != estimate.d) throw DimensionMismatch("edge_errors: node counts differ");
    int type1 = 0, type2 = 0;
    for (const auto& e : estimate.edges)
        if (!truth.edges.count(e)) ++type1;
    for (const auto& e : truth.edges)
        if (!estimate.edges.count(e)) ++type2;
    return {type1, type2};
}

std::string graph_to_json(const UndirectedGraph& g) {
    nlohmann::json j;
    j["d"] = g.d;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = edges;
    return j.dump(2);
}

UndirectedGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    UndirectedGraph g(j.at("d").get<int>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
}

void write_adjacency_csv(const std::string& path, const UndirectedGraph& g) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_adjacency_csv: cannot open " + path);
    for (int i = 1; i <= g.d; ++i)
        for (int j = 1; j <= g.d; ++j)
            std::fprintf(f, j == g.d ? "%d\n" : "%d,", (i != j && g.has_edge(i, j)) ? 1 : 0);
    std::fclose(f);
}

}  // namespace sing
