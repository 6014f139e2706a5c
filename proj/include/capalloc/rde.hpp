#ifndef CAPALLOC_RDE_HPP
#define CAPALLOC_RDE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "capalloc/dist.hpp"
#include "capalloc/errors.hpp"
#include "capalloc/laws.hpp"

namespace capalloc {

/// Marginal laws of X(c) and Y(c), one FiniteDist on [0, c] per capacity value.
struct EdgeLawPair {
    std::map<int, FiniteDist> X, Y;

    double tv_gap(const EdgeLawPair& o) const {
        double d = 0.0;
        for (const auto& [c, m] : X) d = std::max(d, m.tv_distance(o.X.at(c)));
        for (const auto& [c, m] : Y) d = std::max(d, m.tv_distance(o.Y.at(c)));
        return d;
    }
};

namespace detail {

/// Law of clip(w − S, 0, c) for S ~ sum_dist.
inline FiniteDist clipped_residual(int w, const FiniteDist& sum_dist, int c) {
    std::vector<double> out(static_cast<std::size_t>(c) + 1, 0.0);
    for (int s = sum_dist.support_min(); s <= sum_dist.support_max(); ++s) {
        int v = std::clamp(w - s, 0, c);
        out[static_cast<std::size_t>(v)] += sum_dist.at(s);
    }
    return FiniteDist::raw(0, std::move(out));
}

/// Law of Σ_i Z(c_i) for independent draws from the per-capacity laws.
inline FiniteDist sum_over_caps(const std::map<int, FiniteDist>& z, const std::vector<int>& caps) {
    if (caps.empty()) return FiniteDist::delta(0);
    std::vector<FiniteDist> parts;
    parts.reserve(caps.size());
    for (int c : caps) parts.push_back(z.at(c));
    return convolve(parts);
}

/// One half-step: per capacity c, the law of clip(W̃ − Σ X_i(C̃_i), 0, c)
/// under the size-biased conditional law of phi given root capacity c.
inline std::map<int, FiniteDist> rde_half_step(const std::map<int, FiniteDist>& x, const VertexLaw& phi,
                                               const std::vector<int>& caps) {
    std::map<int, FiniteDist> out;
    for (int c : caps) {
        VertexLaw sb = size_biased(phi, c);
        std::vector<double> mix(static_cast<std::size_t>(c) + 1, 0.0);
        for (const LawAtom& a : sb.atoms()) {
            FiniteDist res = clipped_residual(a.w, sum_over_caps(x, a.caps), c);
            for (int v = 0; v <= c; ++v) mix[static_cast<std::size_t>(v)] += a.p * res.at(v);
        }
        out.emplace(c, FiniteDist::raw(0, std::move(mix)));
    }
    return out;
}

struct ClassProfile {
    double prob;
    long long sum;
    std::vector<int> counts;  // counts[v] draws equal to v, for v in 0..c
};

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// All value-count profiles of k i.i.d. draws from y (support 0..c) with their
/// multinomial probabilities.
inline std::vector<ClassProfile> class_profiles(int k, const FiniteDist& y, int c) {
    std::vector<ClassProfile> out;
    std::vector<int> counts(static_cast<std::size_t>(c) + 1, 0);
    auto rec = [&](auto&& self, int v, int rem, double prob, long long sum) -> void {
        if (v == c) {
            counts[static_cast<std::size_t>(v)] = rem;
            double p = prob * std::pow(y.at(v), rem);
            if (p > 0.0) out.push_back({p, sum + static_cast<long long>(v) * rem, counts});
            return;
        }
        for (int n = 0; n <= rem; ++n) {
            counts[static_cast<std::size_t>(v)] = n;
            double p = prob * binom(rem, n) * std::pow(y.at(v), n);
            if (p > 0.0 || n == 0) self(self, v + 1, rem - n, p, sum + static_cast<long long>(v) * n);
        }
    };
    rec(rec, 0, k, 1.0, 0);
    return out;
}

}  // namespace detail

/// One full two-step application of the recursive distributional equation:
/// Y from the current X through Φ̃^A, then X from the updated Y through Φ̃^B.
inline EdgeLawPair rde_step(const EdgeLawPair& pair, const VertexLaw& phiA, const VertexLaw& phiB) {
    std::vector<int> caps;
    caps.reserve(pair.X.size());
    for (const auto& [c, m] : pair.X) caps.push_back(c);
    EdgeLawPair next;
    next.Y = detail::rde_half_step(pair.X, phiA, caps);
    next.X = detail::rde_half_step(next.Y, phiB, caps);
    return next;
}

inline EdgeLawPair extremal_pair(const VertexLaw& phiA, const VertexLaw& phiB, bool high) {
    std::vector<int> caps = phiA.cap_values();
    for (int c : phiB.cap_values()) {
        if (std::find(caps.begin(), caps.end(), c) == caps.end()) caps.push_back(c);
    }
    EdgeLawPair pair;
    for (int c : caps) {
        pair.X.emplace(c, FiniteDist::delta(high ? c : 0));
        pair.Y.emplace(c, FiniteDist::delta(0));
    }
    if (!caps.empty()) pair = rde_step(pair, phiA, phiB);  // installs matching Y laws
    return pair;
}

/// The limit functional evaluated at an (approximate) RDE fixed point:
///   E[min{W^A, Σ X_i(C^A_i)}]
///   + (E[D^A]/E[D^B])·E[(W^B − Σ_i [W^B − Σ_{j≠i} Y_j(C^B_j)]_0^{C^B_i})^+ 1(W^B < Σ C^B_i)].
/// The second expectation is computed exactly by enumerating per-capacity-class
/// value-count profiles of the incident Y draws with multinomial weights.
inline double limit_functional(const EdgeLawPair& pair, const VertexLaw& phiA, const VertexLaw& phiB) {
    double term1 = 0.0;
    for (const LawAtom& a : phiA.atoms()) {
        FiniteDist s = detail::sum_over_caps(pair.X, a.caps);
        double e = 0.0;
        for (int v = s.support_min(); v <= s.support_max(); ++v) e += s.at(v) * std::min(a.w, v);
        term1 += a.p * e;
    }
    if (phiA.mean_degree() <= 0.0) return term1;
    double term2 = 0.0;
    for (const LawAtom& a : phiB.atoms()) {
        long long cap_sum = 0;
        for (int c : a.caps) cap_sum += c;
        if (a.w >= cap_sum) continue;  // indicator
        std::map<int, int> classes;  // capacity value -> count among the atom's caps
        for (int c : a.caps) ++classes[c];
        std::vector<std::pair<int, std::vector<detail::ClassProfile>>> per_class;
        double cost = 1.0;
        for (const auto& [c, k] : classes) {
            cost *= detail::binom(k + c, c);
            if (cost > 1e7) throw TooLarge("profile enumeration exceeds the guard");
            per_class.emplace_back(c, detail::class_profiles(k, pair.Y.at(c), c));
        }
        std::vector<const detail::ClassProfile*> chosen(per_class.size(), nullptr);
        double atom_e = 0.0;
        auto rec = [&](auto&& self, std::size_t ci, double prob, long long total) -> void {
            if (ci == per_class.size()) {
                double inner = 0.0;
                for (std::size_t j = 0; j < per_class.size(); ++j) {
                    int c = per_class[j].first;
                    const std::vector<int>& counts = chosen[j]->counts;
                    for (int v = 0; v <= c; ++v) {
                        if (counts[static_cast<std::size_t>(v)] == 0) continue;
                        // leave-one-out sum for a draw of value v in class c
                        long long rest = total - v;
                        int clipped = static_cast<int>(std::clamp<long long>(a.w - rest, 0, c));
                        inner += static_cast<double>(counts[static_cast<std::size_t>(v)]) * clipped;
                    }
                }
                atom_e += prob * std::max(0.0, a.w - inner);
                return;
            }
            for (const detail::ClassProfile& cp : per_class[ci].second) {
                chosen[ci] = &cp;
                self(self, ci + 1, prob * cp.prob, total + cp.sum);
            }
        };
        rec(rec, 0, 1.0, 0);
        term2 += a.p * atom_e;
    }
    return term1 + phiA.mean_degree() / phiB.mean_degree() * term2;
}

struct LimitResult {
    double value = 0.0;       // min of the two extremal-start functional values
    double value_low = 0.0;   // from X(c) = δ_0
    double value_high = 0.0;  // from X(c) = δ_c
    double gap = 0.0;         // max TV distance between the two fixed points
    int sweeps_low = 0;
    int sweeps_high = 0;
};

/// Iterates the RDE to a fixed point from both extremal initializations and
/// evaluates the limit functional at each.
inline LimitResult limit_M(const VertexLaw& phiA, const VertexLaw& phiB, double tol = 1e-12,
                           int max_sweeps = 100000) {
    if (!check_consistency(phiA, phiB)) throw InconsistentLaws("edge-capacity frequencies disagree");
    LimitResult r;
    EdgeLawPair fixed[2];
    for (int hi = 0; hi < 2; ++hi) {
        EdgeLawPair cur = extremal_pair(phiA, phiB, hi == 1);
        int sweeps = 0;
        if (!cur.X.empty()) {
            for (;; ++sweeps) {
                if (sweeps >= max_sweeps) throw NoConvergence("distributional iteration exhausted its sweep cap");
                EdgeLawPair next = rde_step(cur, phiA, phiB);
                double gap = next.tv_gap(cur);
                cur = std::move(next);
                if (gap <= tol) break;
            }
        }
        double value = limit_functional(cur, phiA, phiB);
        fixed[hi] = std::move(cur);
        if (hi == 0) {
            r.value_low = value;
            r.sweeps_low = sweeps;
        } else {
            r.value_high = value;
            r.sweeps_high = sweeps;
        }
    }
    if (!fixed[0].X.empty()) r.gap = fixed[0].tv_gap(fixed[1]);
    r.value = std::min(r.value_low, r.value_high);
    return r;
}

}  // namespace capalloc

#endif
