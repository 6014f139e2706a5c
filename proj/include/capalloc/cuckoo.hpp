#ifndef CAPALLOC_CUCKOO_HPP
#define CAPALLOC_CUCKOO_HPP

#include <string>
#include <utility>
#include <vector>

#include "capalloc/errors.hpp"
#include "capalloc/graph.hpp"
#include "capalloc/laws.hpp"
#include "capalloc/rde.hpp"

namespace capalloc {

/// Orientability parameters: h-uniform hyperedges, vertex in-degree bound k,
/// per-hyperedge total l, per-endpoint mark bound r.
struct CuckooParams {
    int h = 2, k = 1, l = 1, r = 1;

    void validate() const {
        if (h < 2 || k < 1 || l < 1 || r < 1) throw InvalidParams("h >= 2 and k, l, r >= 1 required");
        if (k < r) throw InvalidParams("k >= r violated");
        if (l < r) throw InvalidParams("l >= r violated");
        if ((static_cast<long long>(h) - 1) * r < l) throw InvalidParams("(h-1)r >= l violated");
    }
};

/// Hyperedge side: degree h, capacity l, all edge caps r.
/// Vertex side: degree Poisson(τh), capacity k, all edge caps r.
inline std::pair<VertexLaw, VertexLaw> cuckoo_laws(const CuckooParams& p, double tau) {
    p.validate();
    if (!(tau > 0.0)) throw InvalidParams("tau must be positive");
    VertexLaw phiA = VertexLaw::from_atoms({{1.0, p.h, p.l, std::vector<int>(static_cast<std::size_t>(p.h), p.r)}});
    VertexLaw phiB = VertexLaw::poisson(tau * p.h, p.k, p.r);
    return {std::move(phiA), std::move(phiB)};
}

/// Smallest τ with asymptotic allocation value below l (equivalently the
/// largest τ at which the value still equals l), located by bisection.
inline double cuckoo_threshold(const CuckooParams& p, double tol = 0.005) {
    p.validate();
    auto supercritical = [&p](double tau) {
        auto [phiA, phiB] = cuckoo_laws(p, tau);
        return limit_M(phiA, phiB).value < p.l - 1e-9;
    };
    double lo = 1e-3;
    double hi = 2.0 * p.k / static_cast<double>(p.l);  // counting bound τ ≤ k/l with safety margin
    if (supercritical(lo) || !supercritical(hi))
        throw BracketFailure("criticality predicate does not change sign on the initial bracket");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (supercritical(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// h-uniform hypergraph as vertex index lists.
struct Hypergraph {
    int n = 0;
    std::vector<std::vector<int>> edges;
};

/// Bipartite incidence graph: one A-vertex per hyperedge (capacity l), one
/// B-vertex per hypergraph vertex (capacity k), incidence edges capped at r.
inline CapGraph incidence_graph(const Hypergraph& hg, const CuckooParams& p) {
    CapGraph::Builder b;
    std::vector<int> edge_ids, vert_ids;
    edge_ids.reserve(hg.edges.size());
    for (std::size_t i = 0; i < hg.edges.size(); ++i)
        edge_ids.push_back(b.add_vertex("e" + std::to_string(i), p.l, Side::A));
    vert_ids.reserve(static_cast<std::size_t>(hg.n));
    for (int v = 0; v < hg.n; ++v) vert_ids.push_back(b.add_vertex("v" + std::to_string(v), p.k, Side::B));
    for (std::size_t i = 0; i < hg.edges.size(); ++i) {
        for (int v : hg.edges[i]) b.add_edge(edge_ids[i], vert_ids[static_cast<std::size_t>(v)], p.r);
    }
    return std::move(b).build();
}

/// A (k,l,r)-orientation exists iff the maximum allocation of the incidence
/// graph saturates every hyperedge capacity.
inline bool orient_decide(const Hypergraph& hg, const CuckooParams& p) {
    p.validate();
    for (const std::vector<int>& e : hg.edges) {
        if (static_cast<int>(e.size()) != p.h) throw InvalidParams("hypergraph is not h-uniform");
    }
    auto [size, witness] = max_allocation_flow(incidence_graph(hg, p));
    return size == static_cast<long long>(p.l) * static_cast<long long>(hg.edges.size());
}

}  // namespace capalloc

#endif
