#ifndef CAPALLOC_GEN_HPP
#define CAPALLOC_GEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "capalloc/cuckoo.hpp"
#include "capalloc/errors.hpp"
#include "capalloc/graph.hpp"
#include "capalloc/laws.hpp"

namespace capalloc {

struct Seed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Deterministic RNG with explicitly coded derived distributions so instances
/// are bit-identical across standard libraries (std::mt19937_64 is specified
/// exactly; the std distribution adaptors are not).
class Rng {
  public:
    explicit Rng(Seed s) : eng_(mix(mix(s.seed) ^ mix(s.stream ^ 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next() { return eng_(); }

    /// Unbiased integer in [0, n) by Lemire's multiply-with-rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("below(0) is undefined");
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Poisson by inversion (sequential search); adequate for rate ≤ ~60.
    int poisson(double rate) {
        if (rate < 0.0 || rate > 500.0) throw Error("poisson rate out of the supported range");
        double u = uniform01();
        double p = std::exp(-rate), cum = p;
        int k = 0;
        while (u > cum && k < 10000) {
            ++k;
            p *= rate / k;
            cum += p;
        }
        return k;
    }

    /// Index drawn with the given (normalized) weights.
    std::size_t categorical(const std::vector<double>& weights) {
        double u = uniform01(), cum = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
};

/// m hyperedges, each a uniform h-subset (distinct vertices within an edge,
/// repeated hyperedges allowed across the multiset).
inline Hypergraph sample_hypergraph(int n, int m, int h, Seed seed) {
    if (h > n || h < 1 || m < 0) throw InvalidParams("need 1 <= h <= n and m >= 0");
    Rng rng(seed);
    Hypergraph hg;
    hg.n = n;
    hg.edges.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::vector<int> e;
        while (static_cast<int>(e.size()) < h) {
            int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            if (std::find(e.begin(), e.end(), v) == e.end()) e.push_back(v);
        }
        std::sort(e.begin(), e.end());
        hg.edges.push_back(std::move(e));
    }
    return hg;
}

/// Alternate model: every h-subset present independently with probability p.
/// The hyperedge count is Binomial(C(n,h), p) — sampled exactly when C(n,h)
/// is small, by its Poisson limit otherwise — then subsets drawn uniformly.
inline Hypergraph sample_hypergraph_np(int n, double p, int h, Seed seed) {
    if (h > n || h < 1 || p < 0.0 || p > 1.0) throw InvalidParams("need 1 <= h <= n and p in [0,1]");
    double total = 1.0;
    for (int i = 0; i < h; ++i) total = total * (n - i) / (i + 1);
    Rng rng(seed);
    int m = 0;
    if (total <= 2e6) {
        long long trials = std::llround(total);
        for (long long i = 0; i < trials; ++i) m += rng.uniform01() < p ? 1 : 0;
    } else {
        m = rng.poisson(total * p);
    }
    Seed sub = seed;
    sub.stream ^= 0x5bf03635ULL;
    Hypergraph hg = sample_hypergraph(n, m, h, sub);
    return hg;
}

/// Bipartite configuration-model sample: nA vertices drawn from phiA,
/// round(nA·E[D^A]/E[D^B]) from phiB, half-edges paired uniformly within each
/// edge-capacity class. Rounding imbalances are repaired by resampling atoms
/// (accepted when the per-class mismatch strictly decreases) and, as a last
/// resort, by deleting the few excess half-edges of an unbalanced class.
inline CapGraph sample_bipartite_config(const VertexLaw& phiA, const VertexLaw& phiB, int nA, Seed seed) {
    if (!check_consistency(phiA, phiB)) throw InconsistentLaws("edge-capacity frequencies disagree");
    if (nA < 1) throw InvalidParams("nA must be positive");
    double edA = phiA.mean_degree(), edB = phiB.mean_degree();
    int nB = edB > 0.0 ? static_cast<int>(std::llround(nA * edA / edB)) : nA;
    nB = std::max(nB, 1);
    Rng rng(seed);

    auto draw_side = [&rng](const VertexLaw& law, int count) {
        std::vector<double> weights;
        weights.reserve(law.atoms().size());
        for (const LawAtom& a : law.atoms()) weights.push_back(a.p);
        std::vector<std::vector<int>> caps(static_cast<std::size_t>(count));
        std::vector<int> w(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const LawAtom& a = law.atoms()[rng.categorical(weights)];
            caps[static_cast<std::size_t>(i)] = a.caps;
            w[static_cast<std::size_t>(i)] = a.w;
        }
        return std::pair(std::move(caps), std::move(w));
    };
    auto [capsA, wA] = draw_side(phiA, nA);
    auto [capsB, wB] = draw_side(phiB, nB);

    auto class_counts = [](const std::vector<std::vector<int>>& caps) {
        std::map<int, long long> cnt;
        for (const std::vector<int>& cs : caps) {
            for (int c : cs) ++cnt[c];
        }
        return cnt;
    };
    std::map<int, long long> diff = class_counts(capsA);  // per-class A-minus-B counts
    for (const auto& [c, k] : class_counts(capsB)) diff[c] -= k;
    auto gap_of = [](const std::map<int, long long>& d) {
        long long total = 0;
        for (const auto& [c, k] : d) total += std::llabs(k);
        return total;
    };
    long long gap = gap_of(diff);
    std::vector<double> weightsA, weightsB;
    for (const LawAtom& a : phiA.atoms()) weightsA.push_back(a.p);
    for (const LawAtom& a : phiB.atoms()) weightsB.push_back(a.p);
    long long budget = 200 + 50 * gap;
    while (gap > 0 && budget-- > 0) {
        bool side_a = rng.below(2) == 0;
        const VertexLaw& law = side_a ? phiA : phiB;
        auto& caps = side_a ? capsA : capsB;
        auto& wv = side_a ? wA : wB;
        std::size_t i = static_cast<std::size_t>(rng.below(caps.size()));
        const LawAtom& a = law.atoms()[rng.categorical(side_a ? weightsA : weightsB)];
        long long sign = side_a ? 1 : -1;
        std::map<int, long long> cand = diff;
        for (int c : caps[i]) cand[c] -= sign;
        for (int c : a.caps) cand[c] += sign;
        long long new_gap = gap_of(cand);
        if (new_gap < gap) {
            gap = new_gap;
            diff = std::move(cand);
            caps[i] = a.caps;
            wv[i] = a.w;
        }
    }
    if (gap > 0) {  // trim excess half-edges of each unbalanced class
        for (const auto& [c, k] : diff) {
            auto& caps = k > 0 ? capsA : capsB;
            for (long long left = std::llabs(k); left > 0;) {
                std::size_t i = static_cast<std::size_t>(rng.below(caps.size()));
                auto it = std::find(caps[i].begin(), caps[i].end(), c);
                if (it == caps[i].end()) continue;
                caps[i].erase(it);
                --left;
            }
        }
    }

    CapGraph::Builder b;
    for (int i = 0; i < nA; ++i) b.add_vertex("a" + std::to_string(i), wA[static_cast<std::size_t>(i)], Side::A);
    for (int i = 0; i < nB; ++i)
        b.add_vertex("b" + std::to_string(i), wB[static_cast<std::size_t>(i)], Side::B);
    std::map<int, std::pair<std::vector<int>, std::vector<int>>> stubs;  // class -> (A stubs, B stubs)
    for (int i = 0; i < nA; ++i) {
        for (int c : capsA[static_cast<std::size_t>(i)]) stubs[c].first.push_back(i);
    }
    for (int i = 0; i < nB; ++i) {
        for (int c : capsB[static_cast<std::size_t>(i)]) stubs[c].second.push_back(nA + i);
    }
    for (auto& [c, s] : stubs) {
        if (s.first.size() != s.second.size()) throw Error("half-edge classes failed to balance");
        rng.shuffle(s.first);
        for (std::size_t i = 0; i < s.first.size(); ++i) b.add_edge(s.first[i], s.second[i], c);
    }
    return std::move(b).build();
}

}  // namespace capalloc

#endif
