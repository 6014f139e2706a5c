#ifndef CAPALLOC_GRAPH_HPP
#define CAPALLOC_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "capalloc/errors.hpp"

namespace capalloc {

enum class Side { None, A, B };

inline constexpr int kInfCap = -1;  // sentinel for unbounded edge capacity

/// Finite multigraph with vertex capacities b_v and edge capacities c_e.
/// Immutable once built. Each undirected edge e owns two directed edges
/// 2e (u→v) and 2e+1 (v→u).
class CapGraph {
  public:
    struct Vertex {
        std::string id;
        int b = 0;
        Side side = Side::None;
    };
    struct Edge {
        int u = 0, v = 0;
        int c = 0;
    };

    class Builder {
      public:
        int add_vertex(std::string id, int b, Side side = Side::None) {
            if (b < 0) throw Error("vertex capacity must be non-negative");
            verts_.push_back({std::move(id), b, side});
            return static_cast<int>(verts_.size()) - 1;
        }
        void add_edge(int u, int v, int c) {
            if (u == v) throw Error("self-loops are not allowed");
            if (u < 0 || v < 0 || u >= static_cast<int>(verts_.size()) || v >= static_cast<int>(verts_.size()))
                throw Error("edge endpoint out of range");
            if (c < 0 && c != kInfCap) throw Error("edge capacity must be non-negative or the inf sentinel");
            edges_.push_back({u, v, c});
        }
        CapGraph build() && { return CapGraph(std::move(verts_), std::move(edges_)); }

      private:
        std::vector<Vertex> verts_;
        std::vector<Edge> edges_;
    };

    int num_vertices() const { return static_cast<int>(verts_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_directed_edges() const { return 2 * num_edges(); }

    const Vertex& vertex(int v) const { return verts_[static_cast<std::size_t>(v)]; }
    const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    // directed-edge helpers: directed index d belongs to undirected edge d/2
    static int undirected(int d) { return d / 2; }
    static int reverse(int d) { return d ^ 1; }
    int tail(int d) const {
        const Edge& e = edges_[static_cast<std::size_t>(d / 2)];
        return (d & 1) ? e.v : e.u;
    }
    int head(int d) const { return tail(reverse(d)); }
    int cap_of(int d) const { return edges_[static_cast<std::size_t>(d / 2)].c; }

    /// Directed edges incoming to v (one per adjacent undirected edge).
    const std::vector<int>& in_edges(int v) const { return in_[static_cast<std::size_t>(v)]; }

    bool declared_bipartite() const { return declared_bipartite_; }

    /// 2-coloring by BFS over the undirected structure; honors declared sides.
    /// Returns empty vector when no 2-coloring exists.
    std::vector<Side> two_coloring() const {
        std::vector<Side> color(static_cast<std::size_t>(num_vertices()), Side::None);
        for (int s = 0; s < num_vertices(); ++s) {
            if (color[static_cast<std::size_t>(s)] != Side::None) continue;
            Side root = verts_[static_cast<std::size_t>(s)].side;
            color[static_cast<std::size_t>(s)] = root == Side::None ? Side::A : root;
            std::queue<int> q;
            q.push(s);
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                Side mine = color[static_cast<std::size_t>(v)];
                Side other = mine == Side::A ? Side::B : Side::A;
                for (int d : in_[static_cast<std::size_t>(v)]) {
                    int u = tail(d);
                    Side& cu = color[static_cast<std::size_t>(u)];
                    if (cu == Side::None) {
                        cu = other;
                        q.push(u);
                    } else if (cu != other) {
                        return {};
                    }
                }
            }
        }
        for (int v = 0; v < num_vertices(); ++v) {
            Side declared = verts_[static_cast<std::size_t>(v)].side;
            if (declared != Side::None && declared != color[static_cast<std::size_t>(v)]) return {};
        }
        return color;
    }

  private:
    CapGraph(std::vector<Vertex> verts, std::vector<Edge> edges)
        : verts_(std::move(verts)), edges_(std::move(edges)) {
        bool any_side = false, all_side = true;
        for (const Vertex& v : verts_) {
            if (v.side != Side::None) any_side = true;
            else all_side = false;
        }
        if (any_side && !all_side) throw Error("either all or no vertices carry a declared side");
        declared_bipartite_ = any_side;
        for (Edge& e : edges_) {
            const Vertex& u = verts_[static_cast<std::size_t>(e.u)];
            const Vertex& v = verts_[static_cast<std::size_t>(e.v)];
            if (declared_bipartite_ && u.side == v.side) throw Error("edge does not cross the declared bipartition");
            if (e.c == kInfCap) e.c = std::min(u.b, v.b);  // an allocation never exceeds either endpoint capacity
        }
        in_.resize(verts_.size());
        for (int e = 0; e < num_edges(); ++e) {
            in_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].v)].push_back(2 * e);
            in_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].u)].push_back(2 * e + 1);
        }
    }

    std::vector<Vertex> verts_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> in_;
    bool declared_bipartite_ = false;
};

/// Integer weights per undirected edge.
struct Allocation {
    std::vector<int> x;
    long long size() const {
        long long s = 0;
        for (int v : x) s += v;
        return s;
    }
};

inline bool validate(const CapGraph& g, const Allocation& a) {
    if (static_cast<int>(a.x.size()) != g.num_edges())
        throw IndexMismatch("allocation does not index the graph's edges");
    for (int e = 0; e < g.num_edges(); ++e) {
        if (a.x[static_cast<std::size_t>(e)] < 0 || a.x[static_cast<std::size_t>(e)] > g.edge(e).c) return false;
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        long long s = 0;
        for (int d : g.in_edges(v)) s += a.x[static_cast<std::size_t>(CapGraph::undirected(d))];
        if (s > g.vertex(v).b) return false;
    }
    return true;
}

namespace detail {

/// Dinic max-flow on integer capacities.
class Dinic {
  public:
    explicit Dinic(int n) : adj_(static_cast<std::size_t>(n)) {}

    int add_arc(int u, int v, long long cap) {
        adj_[static_cast<std::size_t>(u)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({v, cap});
        adj_[static_cast<std::size_t>(v)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({u, 0});
        return static_cast<int>(arcs_.size()) - 2;
    }

    long long residual(int arc) const { return arcs_[static_cast<std::size_t>(arc)].cap; }

    long long max_flow(int s, int t) {
        long long flow = 0;
        while (bfs(s, t)) {
            it_.assign(adj_.size(), 0);
            while (long long f = dfs(s, t, std::numeric_limits<long long>::max())) flow += f;
        }
        return flow;
    }

  private:
    struct Arc {
        int to;
        long long cap;
    };

    bool bfs(int s, int t) {
        level_.assign(adj_.size(), -1);
        std::queue<int> q;
        level_[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int id : adj_[static_cast<std::size_t>(v)]) {
                const Arc& a = arcs_[static_cast<std::size_t>(id)];
                if (a.cap > 0 && level_[static_cast<std::size_t>(a.to)] < 0) {
                    level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(v)] + 1;
                    q.push(a.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    long long dfs(int v, int t, long long pushed) {
        if (v == t) return pushed;
        for (std::size_t& i = it_[static_cast<std::size_t>(v)]; i < adj_[static_cast<std::size_t>(v)].size(); ++i) {
            int id = adj_[static_cast<std::size_t>(v)][i];
            Arc& a = arcs_[static_cast<std::size_t>(id)];
            if (a.cap <= 0 || level_[static_cast<std::size_t>(a.to)] != level_[static_cast<std::size_t>(v)] + 1)
                continue;
            long long f = dfs(a.to, t, std::min(pushed, a.cap));
            if (f > 0) {
                a.cap -= f;
                arcs_[static_cast<std::size_t>(id ^ 1)].cap += f;
                return f;
            }
        }
        return 0;
    }

    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_;
    std::vector<std::size_t> it_;
};

inline double enum_guard(const CapGraph& g) {
    double prod = 1.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        prod *= g.edge(e).c + 1;
        if (prod > 1e7) throw TooLarge("edge-value box exceeds the enumeration guard");
    }
    return prod;
}

}  // namespace detail

/// Exact maximum allocation via an integral max-flow reduction. The graph
/// must be 2-colorable (all certified uses are bipartite or trees).
inline std::pair<long long, Allocation> max_allocation_flow(const CapGraph& g) {
    std::vector<Side> color = g.two_coloring();
    if (color.empty()) throw NotBipartite();
    const int n = g.num_vertices();
    const int s = n, t = n + 1;
    detail::Dinic net(n + 2);
    for (int v = 0; v < n; ++v) {
        if (color[static_cast<std::size_t>(v)] == Side::A)
            net.add_arc(s, v, g.vertex(v).b);
        else
            net.add_arc(v, t, g.vertex(v).b);
    }
    std::vector<int> edge_arc(static_cast<std::size_t>(g.num_edges()));
    for (int e = 0; e < g.num_edges(); ++e) {
        int u = g.edge(e).u, v = g.edge(e).v;
        if (color[static_cast<std::size_t>(u)] != Side::A) std::swap(u, v);
        edge_arc[static_cast<std::size_t>(e)] = net.add_arc(u, v, g.edge(e).c);
    }
    long long flow = net.max_flow(s, t);
    Allocation a;
    a.x.resize(static_cast<std::size_t>(g.num_edges()));
    for (int e = 0; e < g.num_edges(); ++e)
        a.x[static_cast<std::size_t>(e)] = static_cast<int>(g.edge(e).c - net.residual(edge_arc[static_cast<std::size_t>(e)]));
    return {flow, std::move(a)};
}

/// Brute-force maximum over the full edge-value box.
inline long long max_allocation_enum(const CapGraph& g) {
    detail::enum_guard(g);
    Allocation a;
    a.x.assign(static_cast<std::size_t>(g.num_edges()), 0);
    long long best = 0;
    while (true) {
        if (validate(g, a)) best = std::max(best, a.size());
        int e = 0;
        while (e < g.num_edges()) {
            if (++a.x[static_cast<std::size_t>(e)] <= g.edge(e).c) break;
            a.x[static_cast<std::size_t>(e)] = 0;
            ++e;
        }
        if (e == g.num_edges()) break;
    }
    return best;
}

struct GibbsResult {
    std::vector<double> occupancy;  // E[Σ_{e∈∂v} X_e] per vertex
    double partition;               // Z_G(λ)
};

/// Exact Gibbs expectations λ^{|x|}·1(x allocation)/Z by enumeration.
inline GibbsResult gibbs_brute(const CapGraph& g, double lambda) {
    detail::enum_guard(g);
    long long m_max = 0;
    for (int e = 0; e < g.num_edges(); ++e) m_max += g.edge(e).c;
    Allocation a;
    a.x.assign(static_cast<std::size_t>(g.num_edges()), 0);
    GibbsResult r;
    r.occupancy.assign(static_cast<std::size_t>(g.num_vertices()), 0.0);
    double z = 0.0;
    // weights scaled by λ^{-m_max} so large λ stays representable
    while (true) {
        if (validate(g, a)) {
            double w = std::pow(lambda, static_cast<double>(a.size() - m_max));
            z += w;
            for (int v = 0; v < g.num_vertices(); ++v) {
                long long occ = 0;
                for (int d : g.in_edges(v)) occ += a.x[static_cast<std::size_t>(CapGraph::undirected(d))];
                r.occupancy[static_cast<std::size_t>(v)] += w * static_cast<double>(occ);
            }
        }
        int e = 0;
        while (e < g.num_edges()) {
            if (++a.x[static_cast<std::size_t>(e)] <= g.edge(e).c) break;
            a.x[static_cast<std::size_t>(e)] = 0;
            ++e;
        }
        if (e == g.num_edges()) break;
    }
    for (double& o : r.occupancy) o /= z;
    r.partition = z * std::pow(lambda, static_cast<double>(m_max));
    return r;
}

}  // namespace capalloc

#endif
