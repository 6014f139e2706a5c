#ifndef CAPALLOC_DIST_HPP
#define CAPALLOC_DIST_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "capalloc/errors.hpp"

namespace capalloc {

// Relative slack absorbing float noise in product comparisons.
inline constexpr double kOrderSlack = 1e-9;
inline constexpr double kNormTol = 1e-12;

/// Probability mass function on a bounded integer range [support_min, support_max].
/// The representation is tight: the first and last stored weights are positive.
/// Interior zeros (gapped supports) are only admitted through `raw`.
class FiniteDist {
  public:
    FiniteDist() : min_(0), w_{1.0} {}

    static FiniteDist delta(int k) {
        FiniteDist d;
        d.min_ = k;
        return d;
    }

    /// Normalizing constructor for interval-supported pmfs; rejects interior zeros.
    static FiniteDist pmf(int support_min, std::vector<double> weights) {
        FiniteDist d = raw(support_min, std::move(weights));
        for (double x : d.w_) {
            if (x <= 0.0) throw Error("interior zero weight; use FiniteDist::raw for gapped supports");
        }
        return d;
    }

    /// Trims and normalizes without forbidding interior zeros.
    static FiniteDist raw(int support_min, std::vector<double> weights) {
        std::size_t lo = 0, hi = weights.size();
        while (lo < hi && weights[lo] <= 0.0) ++lo;
        while (hi > lo && weights[hi - 1] <= 0.0) --hi;
        if (lo == hi) throw Error("cannot build a distribution from an all-zero weight vector");
        FiniteDist d;
        d.min_ = support_min + static_cast<int>(lo);
        d.w_.assign(weights.begin() + static_cast<std::ptrdiff_t>(lo),
                    weights.begin() + static_cast<std::ptrdiff_t>(hi));
        double total = std::accumulate(d.w_.begin(), d.w_.end(), 0.0);
        for (double& x : d.w_) x /= total;
        return d;
    }

    int support_min() const { return min_; }
    int support_max() const { return min_ + static_cast<int>(w_.size()) - 1; }

    double at(int x) const {
        if (x < min_ || x > support_max()) return 0.0;
        return w_[static_cast<std::size_t>(x - min_)];
    }

    const std::vector<double>& weights() const { return w_; }

    double mean() const {
        double s = 0.0;
        for (int x = min_; x <= support_max(); ++x) s += x * at(x);
        return s;
    }

    double total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

    bool operator==(const FiniteDist& o) const = default;

    double l1_distance(const FiniteDist& o) const {
        int lo = std::min(min_, o.min_), hi = std::max(support_max(), o.support_max());
        double s = 0.0;
        for (int x = lo; x <= hi; ++x) s += std::abs(at(x) - o.at(x));
        return s;
    }

    double tv_distance(const FiniteDist& o) const { return 0.5 * l1_distance(o); }

  private:
    int min_;
    std::vector<double> w_;
};

/// m ≤lr↑ m2: m(i+k+l)·m2(i) ≤ m(i+l)·m2(i+k) for all i,l ≥ 0, k ≥ 1.
/// The check is finite on bounded supports.
inline bool lr_le(const FiniteDist& m, const FiniteDist& m2) {
    const int bm = m.support_max(), bm2 = m2.support_max();
    for (int i = m2.support_min(); i <= bm2; ++i) {
        for (int l = 0; i + l <= bm; ++l) {
            for (int k = 1; i + k + l <= bm; ++k) {
                double lhs = m.at(i + k + l) * m2.at(i);
                if (lhs == 0.0) continue;
                double rhs = m.at(i + l) * m2.at(i + k);
                if (lhs > rhs + kOrderSlack * std::max(lhs, rhs)) return false;
            }
        }
    }
    return true;
}

/// Strict variant: ordered, and not equivalent under the slack.
inline bool lr_lt(const FiniteDist& m, const FiniteDist& m2) {
    return lr_le(m, m2) && !lr_le(m2, m);
}

/// Interval support and p_i·p_{i+2} ≤ p_{i+1}².
inline bool is_log_concave(const FiniteDist& m) {
    for (double x : m.weights()) {
        if (x <= 0.0) return false;  // gapped support
    }
    for (int i = m.support_min(); i + 2 <= m.support_max(); ++i) {
        double lhs = m.at(i) * m.at(i + 2);
        double rhs = m.at(i + 1) * m.at(i + 1);
        if (lhs > rhs + kOrderSlack * std::max(lhs, rhs)) return false;
    }
    return true;
}

/// Distribution of the sum of independent draws.
inline FiniteDist convolve(std::span<const FiniteDist> ms) {
    if (ms.empty()) throw Error("convolve requires a non-empty list");
    int min_sum = 0;
    std::vector<double> acc{1.0};
    for (const FiniteDist& m : ms) {
        min_sum += m.support_min();
        const auto& w = m.weights();
        std::vector<double> next(acc.size() + w.size() - 1, 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] == 0.0) continue;
            for (std::size_t j = 0; j < w.size(); ++j) next[i + j] += acc[i] * w[j];
        }
        acc = std::move(next);
    }
    return FiniteDist::raw(min_sum, std::move(acc));
}

inline FiniteDist convolve(std::initializer_list<FiniteDist> ms) {
    return convolve(std::span<const FiniteDist>(ms.begin(), ms.size()));
}

/// m·p(x) = m(x)p(x) / Σ m(y)p(y), with p given as a function of the abscissa.
inline FiniteDist reweight(const FiniteDist& m, const std::function<double(int)>& p) {
    std::vector<double> w(m.weights().size());
    double total = 0.0;
    for (int x = m.support_min(); x <= m.support_max(); ++x) {
        double v = m.at(x) * p(x);
        w[static_cast<std::size_t>(x - m.support_min())] = v;
        total += v;
    }
    if (total <= 0.0) throw DisjointSupports();
    return FiniteDist::raw(m.support_min(), std::move(w));
}

/// p indexed from abscissa 0; entries beyond p.size() are zero.
inline FiniteDist reweight(const FiniteDist& m, std::span<const double> p) {
    return reweight(m, [&p](int x) {
        return (x >= 0 && static_cast<std::size_t>(x) < p.size()) ? p[static_cast<std::size_t>(x)] : 0.0;
    });
}

/// p^R(x) = p(b − x)·1(x ≤ b) on raw sequences indexed from 0.
inline std::vector<double> shifted_reversal(std::span<const double> p, int b) {
    if (b < 0) throw Error("shifted_reversal requires b >= 0");
    std::vector<double> out(static_cast<std::size_t>(b) + 1, 0.0);
    for (int x = 0; x <= b; ++x) {
        int src = b - x;
        if (static_cast<std::size_t>(src) < p.size()) out[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(src)];
    }
    return out;
}

inline FiniteDist shifted_reversal(const FiniteDist& m, int b) {
    if (m.support_max() > b || m.support_min() < 0) throw Error("support must lie in [0, b]");
    std::vector<double> p(static_cast<std::size_t>(m.support_max()) + 1, 0.0);
    for (int x = std::max(0, m.support_min()); x <= m.support_max(); ++x) p[static_cast<std::size_t>(x)] = m.at(x);
    return FiniteDist::raw(0, shifted_reversal(p, b));
}

}  // namespace capalloc

#endif
