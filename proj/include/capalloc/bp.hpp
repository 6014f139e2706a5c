#ifndef CAPALLOC_BP_HPP
#define CAPALLOC_BP_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "capalloc/dist.hpp"
#include "capalloc/graph.hpp"

namespace capalloc {

/// One message (a FiniteDist supported in [0, c_e]) per directed edge.
struct MessageState {
    std::vector<FiniteDist> msg;

    static MessageState all_delta0(const CapGraph& g) {
        MessageState s;
        s.msg.assign(static_cast<std::size_t>(g.num_directed_edges()), FiniteDist::delta(0));
        return s;
    }

    double linf_distance(const MessageState& o) const {
        double d = 0.0;
        for (std::size_t i = 0; i < msg.size(); ++i) d = std::max(d, msg[i].l1_distance(o.msg[i]));
        return d;
    }
};

/// Support infimum (or supremum) per directed edge; the zero-temperature state.
struct AlphaVector {
    std::vector<int> a;
    bool operator==(const AlphaVector&) const = default;
};

inline constexpr double kLambdaInf = std::numeric_limits<double>::infinity();
inline constexpr double kLambdaCap = 1e6;  // beyond this, use the zero-temperature engine

namespace detail {

/// Convolution of the messages incoming to tail(e) on edges other than the
/// reverse of e, as an absolute-indexed weight vector (index = sum value).
/// `tilt` multiplies each incoming message by λ^x first.
inline std::vector<double> fan_in_convolution(const CapGraph& g, int e, const MessageState& s, double tilt) {
    const int v = g.tail(e);
    std::vector<double> acc{1.0};
    for (int d : g.in_edges(v)) {
        if (d == CapGraph::reverse(e)) continue;
        const FiniteDist& m = s.msg[static_cast<std::size_t>(d)];
        const int lo = m.support_min(), hi = m.support_max();
        std::vector<double> next(acc.size() + static_cast<std::size_t>(hi), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] == 0.0) continue;
            double t = tilt == 1.0 ? 1.0 : std::pow(tilt, lo);
            for (int x = lo; x <= hi; ++x) {
                next[i + static_cast<std::size_t>(x)] += acc[i] * m.at(x) * t;
                t *= tilt;
            }
        }
        acc = std::move(next);
    }
    return acc;
}

inline std::vector<double> vertex_convolution(const CapGraph& g, int v, const MessageState& s) {
    std::vector<double> acc{1.0};
    for (int d : g.in_edges(v)) {
        const FiniteDist& m = s.msg[static_cast<std::size_t>(d)];
        std::vector<double> next(acc.size() + static_cast<std::size_t>(m.support_max()), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] == 0.0) continue;
            for (int x = m.support_min(); x <= m.support_max(); ++x)
                next[i + static_cast<std::size_t>(x)] += acc[i] * m.at(x);
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace detail

/// Outgoing message on directed edge e from the messages incoming to its tail:
/// R(x) ∝ λ^x·1(x ≤ c_e)·Σ_{|y| ≤ b_v − x} Π m_i(y_i); δ_0 when the incoming
/// support infima already exceed b_v.
inline FiniteDist op_R(const CapGraph& g, int e, const MessageState& s, double lambda) {
    const int b = g.vertex(g.tail(e)).b;
    const int c = g.cap_of(e);
    std::vector<double> conv = detail::fan_in_convolution(g, e, s, 1.0);
    std::vector<double> tail_sum(static_cast<std::size_t>(c) + 1, 0.0);
    int x_ref = 0;  // exponent anchor so λ^x cannot overflow the weights
    for (int x = 0; x <= c; ++x) {
        double t = 0.0;
        for (int y = 0; y <= b - x && static_cast<std::size_t>(y) < conv.size(); ++y)
            t += conv[static_cast<std::size_t>(y)];
        tail_sum[static_cast<std::size_t>(x)] = t;
        if (t > 0.0) x_ref = x;
    }
    std::vector<double> w(static_cast<std::size_t>(c) + 1, 0.0);
    double total = 0.0;
    for (int x = 0; x <= c; ++x) {
        double v = tail_sum[static_cast<std::size_t>(x)];
        if (v == 0.0) continue;
        v *= std::pow(lambda, x - x_ref);
        w[static_cast<std::size_t>(x)] = v;
        total += v;
    }
    if (total <= 0.0) return FiniteDist::delta(0);
    return FiniteDist::raw(0, std::move(w));
}

/// Expected occupancy Σ_{e∈∂v} X_e at vertex v from its incoming messages;
/// b_v when the incoming support infima already exceed b_v.
inline double op_D(const CapGraph& g, int v, const MessageState& s) {
    const int b = g.vertex(v).b;
    std::vector<double> conv = detail::vertex_convolution(g, v, s);
    double num = 0.0, den = 0.0;
    for (int x = 0; x <= b && static_cast<std::size_t>(x) < conv.size(); ++x) {
        num += x * conv[static_cast<std::size_t>(x)];
        den += conv[static_cast<std::size_t>(x)];
    }
    if (den <= 0.0) return static_cast<double>(b);
    return num / den;
}

/// Q^(λ)[n] = R^(λ)[λ^ℕ·n] for finite λ; for λ = ∞,
/// Q[n](x) ∝ 1(x ≤ c_e)·Σ_{|y| = b_v − x} Π n_i(y_i), degenerating to δ_{c_e}.
inline FiniteDist op_Q(const CapGraph& g, int e, const MessageState& s, double lambda) {
    const int b = g.vertex(g.tail(e)).b;
    const int c = g.cap_of(e);
    if (!std::isinf(lambda)) {
        MessageState tilted = s;
        for (int d : g.in_edges(g.tail(e))) {
            if (d == CapGraph::reverse(e)) continue;
            tilted.msg[static_cast<std::size_t>(d)] =
                reweight(s.msg[static_cast<std::size_t>(d)], [lambda](int x) { return std::pow(lambda, x); });
        }
        return op_R(g, e, tilted, lambda);
    }
    std::vector<double> conv = detail::fan_in_convolution(g, e, s, 1.0);
    std::vector<double> w(static_cast<std::size_t>(c) + 1, 0.0);
    double total = 0.0;
    for (int x = 0; x <= c; ++x) {
        int y = b - x;
        if (y >= 0 && static_cast<std::size_t>(y) < conv.size()) {
            w[static_cast<std::size_t>(x)] = conv[static_cast<std::size_t>(y)];
            total += w[static_cast<std::size_t>(x)];
        }
    }
    if (total <= 0.0) return FiniteDist::delta(c);
    return FiniteDist::raw(0, std::move(w));
}

/// S_e(x) = [b_v − |x_{∂e}|]_0^{c_e}.
inline int op_S(const CapGraph& g, int e, const AlphaVector& alpha) {
    const int v = g.tail(e);
    long long sum = 0;
    for (int d : g.in_edges(v)) {
        if (d == CapGraph::reverse(e)) continue;
        sum += alpha.a[static_cast<std::size_t>(d)];
    }
    long long s = g.vertex(v).b - sum;
    return static_cast<int>(std::clamp<long long>(s, 0, g.cap_of(e)));
}

inline AlphaVector apply_S(const CapGraph& g, const AlphaVector& alpha) {
    AlphaVector out;
    out.a.resize(static_cast<std::size_t>(g.num_directed_edges()));
    for (int e = 0; e < g.num_directed_edges(); ++e) out.a[static_cast<std::size_t>(e)] = op_S(g, e, alpha);
    return out;
}

inline MessageState bp_sweep(const CapGraph& g, const MessageState& s, double lambda) {
    MessageState out;
    out.msg.resize(static_cast<std::size_t>(g.num_directed_edges()));
    for (int e = 0; e < g.num_directed_edges(); ++e) out.msg[static_cast<std::size_t>(e)] = op_R(g, e, s, lambda);
    return out;
}

struct BpOptions {
    double tol = 1e-10;
    int max_sweeps = 0;  // 0: derived from the graph (10·(n + Σc_e) + 1000)
    const MessageState* init = nullptr;
    // called after every sweep with (sweep index starting at 1, new state)
    std::function<void(int, const MessageState&)> observer;
};

struct BpResult {
    MessageState state;
    int sweeps = 0;
};

/// Synchronous fixed-point iteration m ← R_G^(λ)[m] from m⁰ ≡ δ_0.
inline BpResult bp_finite_lambda(const CapGraph& g, double lambda, BpOptions opt = {}) {
    if (!(lambda > 0.0)) throw Error("lambda must be positive");
    if (lambda > kLambdaCap) throw Error("lambda exceeds the finite-temperature cap; use bp_zero_temperature");
    int max_sweeps = opt.max_sweeps;
    if (max_sweeps == 0) {
        long long csum = 0;
        for (int e = 0; e < g.num_edges(); ++e) csum += g.edge(e).c;
        max_sweeps = static_cast<int>(std::min<long long>(10 * (g.num_vertices() + csum) + 1000, 1000000));
    }
    const bool canonical = opt.init == nullptr;
    MessageState cur = canonical ? MessageState::all_delta0(g) : *opt.init;
    for (int t = 1; t <= max_sweeps; ++t) {
        MessageState next = bp_sweep(g, cur, lambda);
        if (canonical) {
            for (const FiniteDist& m : next.msg) {
                if (m.support_min() != 0 || !is_log_concave(m))
                    throw Error("message left the log-concave interval class");
            }
        }
        if (opt.observer) opt.observer(t, next);
        if (next.linf_distance(cur) <= opt.tol) return {std::move(next), t};
        cur = std::move(next);
    }
    throw NoConvergence("finite-lambda sweeps exhausted before reaching tolerance");
}

/// Σ_v F_v at a two-step fixed point (α, β = S_G(α)).
/// F_v = min(b_v, Σ_in α) plus the unserved slack (b_v − Σ_out α)^+, the latter
/// only when the incoming support suprema exceed b_v.
inline double alpha_estimate(const CapGraph& g, const AlphaVector& alpha, const AlphaVector& beta) {
    double total = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const int b = g.vertex(v).b;
        long long in_alpha = 0, out_alpha = 0, in_beta = 0;
        for (int d : g.in_edges(v)) {
            in_alpha += alpha.a[static_cast<std::size_t>(d)];
            in_beta += beta.a[static_cast<std::size_t>(d)];
            out_alpha += alpha.a[static_cast<std::size_t>(CapGraph::reverse(d))];
        }
        total += static_cast<double>(std::min<long long>(b, in_alpha));
        if (in_beta > b) total += static_cast<double>(std::max<long long>(b - out_alpha, 0));
    }
    return total;
}

struct ZeroTempResult {
    AlphaVector alpha;  // two-step fixed point of S_G∘S_G minimizing Σ_v F_v
    AlphaVector beta;   // S_G(alpha)
    double estimate;    // Σ_v F_v(alpha); equals 2·M(G) on bipartite graphs
};

namespace detail {

// The zero-temperature state is the λ→∞ limit of the finite-λ messages.  Along
// that limit each message component decays like a power of λ, so the limit is
// governed by the vector of decay exponents per directed edge: exponent 0 marks
// a component that survives in the limit, and the support infimum α_e is the
// first surviving component.  The exponent recursion below is the λ→∞ shadow of
// bp_sweep: sums of powers of 1/λ are dominated by the smallest exponent, so
// convolution becomes min-plus convolution and normalization subtracts the
// largest λ-exponent.

inline constexpr int kExpInf = 1 << 20;  // effectively infinite decay exponent

using ExponentState = std::vector<std::vector<int>>;  // per directed edge, index x ∈ [0, c_e]

inline std::vector<int> tropical_update(const CapGraph& g, const ExponentState& phi, int e) {
    const int v = g.tail(e);
    const int b = g.vertex(v).b;
    const int c = g.cap_of(e);
    // min-plus fan-in convolution, truncated at total b
    std::vector<int> h{0};
    for (int d : g.in_edges(v)) {
        if (d == CapGraph::reverse(e)) continue;
        const std::vector<int>& p = phi[static_cast<std::size_t>(d)];
        std::vector<int> nh(std::min(h.size() + p.size() - 1, static_cast<std::size_t>(b) + 1), kExpInf);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] >= kExpInf) continue;
            for (std::size_t j = 0; j < p.size() && i + j < nh.size(); ++j)
                if (p[j] < kExpInf) nh[i + j] = std::min(nh[i + j], h[i] + p[j]);
        }
        h = std::move(nh);
    }
    // H(s) = best exponent of a fan-in total ≤ s
    std::vector<int> prefix(static_cast<std::size_t>(b) + 1, kExpInf);
    int run = kExpInf;
    for (int s = 0; s <= b; ++s) {
        if (s < static_cast<int>(h.size())) run = std::min(run, h[static_cast<std::size_t>(s)]);
        prefix[static_cast<std::size_t>(s)] = run;
    }
    // λ-exponent of the unnormalized output at x is x − H(b − x); normalization
    // keeps the largest one at decay 0
    std::vector<int> lam(static_cast<std::size_t>(c) + 1, -kExpInf);
    int top = -kExpInf;
    for (int x = 0; x <= c; ++x) {
        if (x <= b && prefix[static_cast<std::size_t>(b - x)] < kExpInf)
            lam[static_cast<std::size_t>(x)] = x - prefix[static_cast<std::size_t>(b - x)];
        top = std::max(top, lam[static_cast<std::size_t>(x)]);
    }
    std::vector<int> out(static_cast<std::size_t>(c) + 1, kExpInf);
    for (int x = 0; x <= c; ++x)
        if (lam[static_cast<std::size_t>(x)] > -kExpInf)
            out[static_cast<std::size_t>(x)] = std::min(top - lam[static_cast<std::size_t>(x)], kExpInf);
    return out;
}

inline ExponentState tropical_sweep(const CapGraph& g, const ExponentState& phi) {
    ExponentState out(static_cast<std::size_t>(g.num_directed_edges()));
    for (int e = 0; e < g.num_directed_edges(); ++e) out[static_cast<std::size_t>(e)] = tropical_update(g, phi, e);
    return out;
}

inline AlphaVector alpha_from_exponents(const ExponentState& phi) {
    AlphaVector a;
    a.a.resize(phi.size());
    for (std::size_t e = 0; e < phi.size(); ++e) {
        int x = 0;
        while (phi[e][static_cast<std::size_t>(x)] != 0) ++x;
        a.a[e] = x;
    }
    return a;
}

/// Iterate α ← S_G(S_G(α)) until fixed.  Guaranteed to terminate when the
/// start already satisfies S∘S(α) ≤ α or ≥ α componentwise (the map is
/// monotone, so such iterates move monotonically in a bounded integer box).
inline bool settle_monotone(const CapGraph& g, AlphaVector& a, int budget) {
    for (int i = 0; i < budget; ++i) {
        AlphaVector n = apply_S(g, apply_S(g, a));
        if (n == a) return true;
        a = std::move(n);
    }
    return false;
}

/// Drive a candidate α to a two-step fixed point.  If the orbit cycles, the
/// componentwise min (max) over the cycle is mapped below (above) itself by
/// the monotone map S∘S, so settling from those brackets terminates; the
/// bracket endpoint with the smaller Σ_v F_v is returned.
inline bool project_to_fixed_point(const CapGraph& g, AlphaVector& alpha) {
    long long csum = 1;
    for (int e = 0; e < g.num_edges(); ++e) csum += g.edge(e).c;
    const int budget = static_cast<int>(
        std::min<long long>(2 * csum + 4 * g.num_directed_edges() + 128, 100000));
    std::map<std::vector<int>, int> seen;
    std::vector<AlphaVector> orbit;
    AlphaVector cur = alpha;
    for (int i = 0; i < budget; ++i) {
        AlphaVector nxt = apply_S(g, apply_S(g, cur));
        if (nxt == cur) {
            alpha = std::move(cur);
            return true;
        }
        auto it = seen.find(nxt.a);
        if (it != seen.end()) {
            AlphaVector lo = nxt, hi = nxt;
            for (std::size_t t = static_cast<std::size_t>(it->second); t < orbit.size(); ++t) {
                for (std::size_t k = 0; k < lo.a.size(); ++k) {
                    lo.a[k] = std::min(lo.a[k], orbit[t].a[k]);
                    hi.a[k] = std::max(hi.a[k], orbit[t].a[k]);
                }
            }
            const bool okl = settle_monotone(g, lo, budget);
            const bool okh = settle_monotone(g, hi, budget);
            if (!okl && !okh) return false;
            const double el = okl ? alpha_estimate(g, lo, apply_S(g, lo)) : std::numeric_limits<double>::infinity();
            const double eh = okh ? alpha_estimate(g, hi, apply_S(g, hi)) : std::numeric_limits<double>::infinity();
            alpha = (el <= eh) ? std::move(lo) : std::move(hi);
            return true;
        }
        seen.emplace(nxt.a, static_cast<int>(orbit.size()));
        orbit.push_back(nxt);
        cur = std::move(nxt);
    }
    return false;
}

/// Numeric fallback with a certificate.  Σ_v D_v at finite λ increases with λ
/// toward the zero-temperature value Σ_v F_v, which is an integer, so
/// ⌈Σ_v D_v − slack⌉ bounds it from below, while every two-step fixed point
/// evaluates to an upper bound.  Candidate fixed points are produced by
/// thresholding the finite-λ message supports at several mass levels (the
/// surviving components approach constants, the rest decay like powers of
/// 1/λ, but slowly-converging coefficients blur any single cutoff) and by
/// snapping the supplied seeds; a candidate whose estimate meets the lower
/// bound is provably optimal and is returned.
inline bool certified_alpha(const CapGraph& g, double lambda, AlphaVector& alpha,
                            const std::vector<AlphaVector>& seeds) {
    BpOptions opt;
    opt.tol = 1e-12;
    opt.max_sweeps = 500000;
    BpResult r = bp_finite_lambda(g, lambda, opt);
    double sum_d = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v) sum_d += op_D(g, v, r.state);
    const double bound = std::max(0.0, std::ceil(sum_d - 1e-3));

    auto certify = [&g, &alpha, bound](AlphaVector cand) {
        if (!project_to_fixed_point(g, cand)) return false;
        if (alpha_estimate(g, cand, apply_S(g, cand)) > bound) return false;
        alpha = std::move(cand);
        return true;
    };
    for (double thr : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        AlphaVector cand;
        cand.a.resize(static_cast<std::size_t>(g.num_directed_edges()));
        for (int e = 0; e < g.num_directed_edges(); ++e) {
            const FiniteDist& m = r.state.msg[static_cast<std::size_t>(e)];
            int x = 0;
            while (x < g.cap_of(e) && m.at(x) < thr) ++x;
            cand.a[static_cast<std::size_t>(e)] = x;
        }
        if (certify(std::move(cand))) return true;
    }
    for (const AlphaVector& seed : seeds) {
        if (certify(seed)) return true;
    }
    return false;
}

}  // namespace detail

/// Zero-temperature solver: computes the support infima α of the λ→∞ message
/// limit by pure integer min-plus iteration of the decay exponents.  Iterating
/// α ← S∘S(α) alone can stall on a fixed point with a larger Σ_v F_v (the first
/// α-update from the all-zero start can already be fixed while the message
/// limit keeps evolving through its surviving coefficients), so the exponent
/// recursion is the primary engine.  When the exponent iteration enters a
/// cycle — the signature of surviving coefficients deciding the limit — the
/// finite-λ engine at large λ resolves the state numerically.
inline ZeroTempResult bp_zero_temperature(const CapGraph& g) {
    const int de = g.num_directed_edges();
    detail::ExponentState phi(static_cast<std::size_t>(de));
    for (int e = 0; e < de; ++e)
        phi[static_cast<std::size_t>(e)].assign(static_cast<std::size_t>(g.cap_of(e)) + 1, 0);
    const int max_sweeps = 10 * (g.num_vertices() + g.num_edges()) + 200;
    detail::ExponentState prev;
    AlphaVector alpha;
    bool solved = false;
    for (int s = 0; s < max_sweeps; ++s) {
        detail::ExponentState next = detail::tropical_sweep(g, phi);
        if (next == phi) {
            alpha = detail::alpha_from_exponents(phi);
            solved = true;
            break;
        }
        if (s > 0 && next == prev) {  // period-2 exponent cycle
            std::vector<AlphaVector> seeds{detail::alpha_from_exponents(phi),
                                           detail::alpha_from_exponents(prev)};
            for (double lambda : {1e4, 1e5, 1e6}) {
                try {
                    if (detail::certified_alpha(g, lambda, alpha, seeds)) {
                        solved = true;
                        break;
                    }
                } catch (const NoConvergence&) {
                }
            }
            break;
        }
        prev = std::move(phi);
        phi = std::move(next);
    }
    if (!solved) throw NoConvergence("zero-temperature state did not stabilize");
    AlphaVector beta = apply_S(g, alpha);
    double estimate = alpha_estimate(g, alpha, beta);
    return {std::move(alpha), std::move(beta), estimate};
}

struct LeafRemovalResult {
    AlphaVector alpha;
    long long size = 0;
};

/// Exact maximum allocation of a forest by the generalized leaf-removal
/// recursion on support bounds, upward then downward passes.
inline LeafRemovalResult tree_leaf_removal(const CapGraph& g) {
    const int n = g.num_vertices();
    if (g.num_edges() != 0 && g.num_edges() >= n) throw NotATree();
    std::vector<int> parent_edge(static_cast<std::size_t>(n), -1);  // directed edge v→parent
    std::vector<int> order;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    order.reserve(static_cast<std::size_t>(n));
    for (int root = 0; root < n; ++root) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = 1;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int d : g.in_edges(v)) {
                int u = g.tail(d);
                if (seen[static_cast<std::size_t>(u)]) {
                    // d and the parent edge are the only allowed back link
                    if (u != (parent_edge[static_cast<std::size_t>(v)] >= 0
                                  ? g.head(parent_edge[static_cast<std::size_t>(v)])
                                  : -1) ||
                        CapGraph::reverse(d) != parent_edge[static_cast<std::size_t>(v)])
                        throw NotATree();
                    continue;
                }
                seen[static_cast<std::size_t>(u)] = 1;
                parent_edge[static_cast<std::size_t>(u)] = d;  // u→v
                stack.push_back(u);
            }
        }
    }
    AlphaVector alpha, beta;
    alpha.a.assign(static_cast<std::size_t>(g.num_directed_edges()), 0);
    beta.a.assign(static_cast<std::size_t>(g.num_directed_edges()), 0);
    auto compute = [&g, &alpha, &beta](int e) {
        // α_e from incoming β's, β_e from incoming α's
        const int v = g.tail(e);
        long long sa = 0, sb = 0;
        for (int d : g.in_edges(v)) {
            if (d == CapGraph::reverse(e)) continue;
            sa += beta.a[static_cast<std::size_t>(d)];
            sb += alpha.a[static_cast<std::size_t>(d)];
        }
        alpha.a[static_cast<std::size_t>(e)] =
            static_cast<int>(std::clamp<long long>(g.vertex(v).b - sa, 0, g.cap_of(e)));
        beta.a[static_cast<std::size_t>(e)] =
            static_cast<int>(std::clamp<long long>(g.vertex(v).b - sb, 0, g.cap_of(e)));
    };
    for (auto it = order.rbegin(); it != order.rend(); ++it) {  // leaves up
        int e = parent_edge[static_cast<std::size_t>(*it)];
        if (e >= 0) compute(e);
    }
    for (int v : order) {  // root down
        int e = parent_edge[static_cast<std::size_t>(v)];
        if (e >= 0) compute(CapGraph::reverse(e));
    }
    double est = alpha_estimate(g, alpha, beta);
    long long size = std::llround(est / 2.0);
    return {std::move(alpha), size};
}

}  // namespace capalloc

#endif
