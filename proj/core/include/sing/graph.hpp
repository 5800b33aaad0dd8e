#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sing/transport.hpp"

namespace sing {

// Undirected graph on nodes 1..d, edges stored canonically as (min, max).
struct UndirectedGraph {
    int d = 0;
    std::set<std::pair<int, int>> edges;

    UndirectedGraph() = default;
    explicit UndirectedGraph(int nodes) : d(nodes) {}

    void add_edge(int i, int j);
    bool has_edge(int i, int j) const;
    std::size_t edge_count() const { return edges.size(); }
    std::vector<int> degrees() const;

    bool operator==(const UndirectedGraph& o) const { return d == o.d && edges == o.edges; }
};

// Permutation of {1..d}: perm[v-1] is the new label of node v.
struct Ordering {
    std::vector<int> perm;

    int size() const { return static_cast<int>(perm.size()); }
    int apply(int v) const { return perm[v - 1]; }
    Ordering inverse() const;
    bool is_valid() const;
    static Ordering identity(int d);

    bool operator==(const Ordering& o) const { return perm == o.perm; }
};

// Lower bound on the sparsity pattern of the triangular map for a density that
// is Markov with respect to g: eliminate nodes d, d-1, ..., turning each
// removed node's current neighborhood into a clique; pair (j,k) enters the
// pattern when j is not a neighbor of k at k's elimination step.
SparsityPattern sparsity_bound(const UndirectedGraph& g);

// Fill-reducing ordering: greedy minimum degree (ties broken deterministically
// by node index), reversed so that nodes eliminated first by the heuristic are
// eliminated first by the sparsity-bound recursion. The empty graph maps to
// the identity permutation.
Ordering reverse_cholesky_ordering(const UndirectedGraph& g);

UndirectedGraph relabel(const UndirectedGraph& g, const Ordering& o);

// (type1, type2) = (edges in estimate but not truth, edges in truth missed).
std::pair<int, int> edge_errors(const UndirectedGraph& truth, const UndirectedGraph& estimate);

std::string graph_to_json(const UndirectedGraph& g);
UndirectedGraph graph_from_json(const std::string& text);
void write_adjacency_csv(const std::string& path, const UndirectedGraph& g);

}  // namespace sing
