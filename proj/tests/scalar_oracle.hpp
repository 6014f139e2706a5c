#ifndef CAPALLOC_TESTS_SCALAR_ORACLE_HPP
#define CAPALLOC_TESTS_SCALAR_ORACLE_HPP

// Independent scalar recursion for the unit-edge-capacity regime: with every
// edge capacity equal to 1, the per-capacity laws X(1), Y(1) are Bernoulli and
// the whole distributional iteration reduces to a one-dimensional recursion on
// success probabilities, evaluated here directly with binomial sums (no shared
// code with the library's distributional engine).

#include <algorithm>
#include <cmath>
#include <vector>

namespace scalar_oracle {

struct Atom {
    double p;  // probability
    int d;     // degree
    int w;     // vertex capacity
};

inline double binom_pmf(int n, int k, double q) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c * std::pow(q, k) * std::pow(1.0 - q, n - k);
}

inline double mean_degree(const std::vector<Atom>& law) {
    double s = 0.0;
    for (const Atom& a : law) s += a.p * a.d;
    return s;
}

/// P(next Bernoulli parameter) given the opposite side's parameter q:
/// size-bias the atoms by degree, then P(Bin(d-1, q) <= w-1).
inline double half_step(const std::vector<Atom>& law, double q) {
    double ed = mean_degree(law);
    double out = 0.0;
    for (const Atom& a : law) {
        if (a.d == 0) continue;
        double tail = 0.0;
        for (int t = 0; t <= std::min(a.d - 1, a.w - 1); ++t) tail += binom_pmf(a.d - 1, t, q);
        out += a.p * a.d / ed * tail;
    }
    return out;
}

/// The limit functional in the scalar regime at Bernoulli parameters
/// (x = P(X=1), y = P(Y=1)).
inline double functional(const std::vector<Atom>& lawA, const std::vector<Atom>& lawB, double x, double y) {
    double term1 = 0.0;
    for (const Atom& a : lawA) {
        for (int t = 0; t <= a.d; ++t) term1 += a.p * binom_pmf(a.d, t, x) * std::min(a.w, t);
    }
    double edA = mean_degree(lawA), edB = mean_degree(lawB);
    if (edA <= 0.0 || edB <= 0.0) return term1;
    double term2 = 0.0;
    for (const Atom& a : lawB) {
        if (a.w >= a.d) continue;  // indicator 1(W < sum of unit caps)
        double e = 0.0;
        for (int t = 0; t <= a.d; ++t) {
            double ones = std::clamp(a.w - t + 1, 0, 1);
            double zeros = std::clamp(a.w - t, 0, 1);
            double inner = t * ones + (a.d - t) * zeros;
            e += binom_pmf(a.d, t, y) * std::max(0.0, a.w - inner);
        }
        term2 += a.p * e;
    }
    return term1 + edA / edB * term2;
}

/// Iterate the two-sided scalar recursion from both extremal starts and return
/// the smaller functional value (mirroring the distributional solver's policy).
inline double limit_value(const std::vector<Atom>& lawA, const std::vector<Atom>& lawB) {
    double best = 0.0;
    for (int hi = 0; hi < 2; ++hi) {
        double x = hi == 1 ? 1.0 : 0.0;
        double y = 0.0;
        for (int it = 0; it < 200000; ++it) {
            double ny = half_step(lawA, x);
            double nx = half_step(lawB, ny);
            double gap = std::max(std::abs(nx - x), std::abs(ny - y));
            x = nx;
            y = ny;
            if (gap <= 1e-13) break;
        }
        double v = functional(lawA, lawB, x, y);
        best = hi == 0 ? v : std::min(best, v);
    }
    return best;
}

}  // namespace scalar_oracle

#endif
