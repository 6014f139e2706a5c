#ifndef CAPALLOC_LAWS_HPP
#define CAPALLOC_LAWS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "capalloc/dist.hpp"
#include "capalloc/errors.hpp"

namespace capalloc {

/// One atom of a vertex law: degree d, vertex capacity w, and the multiset of
/// adjacent edge capacities (caps.size() == d, kept sorted).
struct LawAtom {
    double p = 0.0;
    int d = 0;
    int w = 0;
    std::vector<int> caps;

    bool operator==(const LawAtom&) const = default;
};

/// Finitely supported joint law of (degree, vertex capacity, edge capacities).
/// Poisson-degree laws are expanded at construction into truncated atoms.
class VertexLaw {
  public:
    static VertexLaw from_atoms(std::vector<LawAtom> atoms) {
        double total = 0.0;
        for (LawAtom& a : atoms) {
            if (a.p < 0.0) throw Error("atom probability must be non-negative");
            if (a.d < 0 || static_cast<int>(a.caps.size()) != a.d)
                throw Error("atom must list exactly d edge capacities");
            if (a.w < 0) throw Error("vertex capacity must be non-negative");
            for (int c : a.caps) {
                if (c < 0) throw Error("edge capacity must be non-negative");
            }
            std::sort(a.caps.begin(), a.caps.end());
            total += a.p;
        }
        if (total <= 0.0) throw ZeroMass("law has no mass");
        std::erase_if(atoms, [](const LawAtom& a) { return a.p == 0.0; });
        for (LawAtom& a : atoms) a.p /= total;
        VertexLaw law;
        law.atoms_ = std::move(atoms);
        return law;
    }

    /// Degree ~ Poisson(rate), fixed vertex capacity w, all edge capacities
    /// equal to cap; truncated so the dropped tail mass is at most trunc.
    static VertexLaw poisson(double rate, int w, int cap, double trunc = 1e-12) {
        if (rate < 0.0 || trunc <= 0.0) throw Error("poisson law requires rate >= 0 and trunc > 0");
        std::vector<LawAtom> atoms;
        double p = std::exp(-rate), cum = 0.0;
        for (int d = 0; cum < 1.0 - trunc || d == 0; ++d) {
            atoms.push_back({p, d, w, std::vector<int>(static_cast<std::size_t>(d), cap)});
            cum += p;
            p *= rate / (d + 1);
            if (d > 10000) throw Error("poisson expansion failed to reach the truncation quantile");
        }
        return from_atoms(std::move(atoms));
    }

    const std::vector<LawAtom>& atoms() const { return atoms_; }

    double mean_degree() const {
        double s = 0.0;
        for (const LawAtom& a : atoms_) s += a.p * a.d;
        return s;
    }

    double mean_w() const {
        double s = 0.0;
        for (const LawAtom& a : atoms_) s += a.p * a.w;
        return s;
    }

    int max_w() const {
        int m = 0;
        for (const LawAtom& a : atoms_) m = std::max(m, a.w);
        return m;
    }

    /// E[ Σ_i 1(C_i = c) ] per capacity value c (unnormalized half-edge intensity).
    std::map<int, double> cap_intensity() const {
        std::map<int, double> f;
        for (const LawAtom& a : atoms_) {
            for (int c : a.caps) f[c] += a.p;
        }
        return f;
    }

    /// Distinct edge-capacity values appearing with positive mass.
    std::vector<int> cap_values() const {
        std::vector<int> out;
        for (const auto& [c, w] : cap_intensity()) {
            if (w > 0.0) out.push_back(c);
        }
        return out;
    }

  private:
    std::vector<LawAtom> atoms_;
};

/// Per-edge-capacity frequency (1/E[D])·E[Σ 1(C_i = c)] — the law of the
/// capacity of a uniformly chosen half-edge.
inline std::map<int, double> edge_cap_freq(const VertexLaw& phi) {
    std::map<int, double> f = phi.cap_intensity();
    double ed = phi.mean_degree();
    if (ed <= 0.0) return {};
    for (auto& [c, w] : f) w /= ed;
    return f;
}

/// Size-biased conditional law given the root-edge capacity c0: atoms carry
/// the remaining degree d−1 and the remaining capacities, weighted by the
/// original mass times the multiplicity of c0 in the atom's capacity multiset.
inline VertexLaw size_biased(const VertexLaw& phi, int c0) {
    std::vector<LawAtom> atoms;
    for (const LawAtom& a : phi.atoms()) {
        auto mult = static_cast<double>(std::count(a.caps.begin(), a.caps.end(), c0));
        if (mult == 0.0) continue;
        LawAtom t;
        t.p = a.p * mult;
        t.d = a.d - 1;
        t.w = a.w;
        t.caps = a.caps;
        t.caps.erase(std::find(t.caps.begin(), t.caps.end(), c0));
        atoms.push_back(std::move(t));
    }
    if (atoms.empty()) throw ZeroMass("no atom contains the requested edge capacity");
    return VertexLaw::from_atoms(std::move(atoms));
}

/// Half-edge capacity frequencies must agree between the two sides.
inline bool check_consistency(const VertexLaw& phiA, const VertexLaw& phiB, double tol = 1e-9) {
    std::map<int, double> fa = edge_cap_freq(phiA), fb = edge_cap_freq(phiB);
    for (const auto& [c, w] : fa) {
        auto it = fb.find(c);
        double wb = it == fb.end() ? 0.0 : it->second;
        if (std::abs(w - wb) > tol) return false;
    }
    for (const auto& [c, w] : fb) {
        if (fa.find(c) == fa.end() && std::abs(w) > tol) return false;
    }
    return true;
}

}  // namespace capalloc

#endif
