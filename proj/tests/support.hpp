#ifndef CAPALLOC_TESTS_SUPPORT_HPP
#define CAPALLOC_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "capalloc/dist.hpp"
#include "capalloc/graph.hpp"

namespace test_support {

using capalloc::CapGraph;
using capalloc::FiniteDist;
using capalloc::Side;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random pmf with interval support in [0, cmax].
inline FiniteDist random_dist(std::mt19937_64& rng, int cmax, int min_lo = 0) {
    int lo = uniform_int(rng, min_lo, cmax);
    int hi = uniform_int(rng, lo, cmax);
    std::vector<double> w(static_cast<std::size_t>(hi - lo) + 1);
    for (double& x : w) x = uniform_real(rng, 0.05, 1.0);
    return FiniteDist::pmf(lo, std::move(w));
}

/// Random log-concave pmf: normalized exponential of a concave sequence.
inline FiniteDist random_log_concave(std::mt19937_64& rng, int cmax) {
    int lo = uniform_int(rng, 0, cmax);
    int hi = uniform_int(rng, lo, cmax);
    std::vector<double> g(static_cast<std::size_t>(hi - lo) + 1, 0.0);
    double slope = uniform_real(rng, -1.5, 1.5);
    for (std::size_t i = 1; i < g.size(); ++i) {
        g[i] = g[i - 1] + slope;
        slope -= uniform_real(rng, 0.0, 1.0);
    }
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::exp(g[i]);
    return FiniteDist::pmf(lo, std::move(w));
}

struct GraphSpec {
    int n_max = 12;
    int b_max = 3;
    int c_max = 2;
    double edge_prob = 0.35;
    bool declare_sides = true;
};

/// Random bipartite multigraph with declared sides.
inline CapGraph random_bipartite_graph(std::mt19937_64& rng, const GraphSpec& spec = {}) {
    int na = uniform_int(rng, 1, std::max(1, spec.n_max / 2));
    int nb = uniform_int(rng, 1, std::max(1, spec.n_max / 2));
    CapGraph::Builder b;
    for (int i = 0; i < na; ++i)
        b.add_vertex("a" + std::to_string(i), uniform_int(rng, 0, spec.b_max),
                     spec.declare_sides ? Side::A : Side::None);
    for (int i = 0; i < nb; ++i)
        b.add_vertex("b" + std::to_string(i), uniform_int(rng, 0, spec.b_max),
                     spec.declare_sides ? Side::B : Side::None);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            while (uniform_real(rng) < spec.edge_prob) b.add_edge(i, na + j, uniform_int(rng, 0, spec.c_max));
        }
    }
    return std::move(b).build();
}

/// Random (possibly loopy, possibly non-bipartite) multigraph.
inline CapGraph random_graph(std::mt19937_64& rng, const GraphSpec& spec = {}) {
    int n = uniform_int(rng, 1, spec.n_max);
    CapGraph::Builder b;
    for (int i = 0; i < n; ++i) b.add_vertex("v" + std::to_string(i), uniform_int(rng, 0, spec.b_max));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            while (uniform_real(rng) < spec.edge_prob) b.add_edge(i, j, uniform_int(rng, 0, spec.c_max));
        }
    }
    return std::move(b).build();
}

/// Uniform random labelled tree (or a small forest when n == 1 components).
inline CapGraph random_tree(std::mt19937_64& rng, int n, int b_max, int c_max) {
    CapGraph::Builder b;
    for (int i = 0; i < n; ++i) b.add_vertex("v" + std::to_string(i), uniform_int(rng, 0, b_max));
    for (int i = 1; i < n; ++i) b.add_edge(i, uniform_int(rng, 0, i - 1), uniform_int(rng, 0, c_max));
    return std::move(b).build();
}

}  // namespace test_support

#endif
