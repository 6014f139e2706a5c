#ifndef CAPALLOC_CDN_HPP
#define CAPALLOC_CDN_HPP

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "capalloc/errors.hpp"
#include "capalloc/laws.hpp"
#include "capalloc/rde.hpp"

namespace capalloc {

/// One atom of a CDN-side marginal: degree d (stored copies / replicas),
/// capacity w (upload capacity for servers, request count ω for contents),
/// and for the coded variant the number of segments per content.
struct CdnAtom {
    double p = 0.0;
    int d = 0;
    int w = 0;
    int segments = 1;
};

struct CdnScenario {
    std::vector<CdnAtom> servers;
    std::vector<CdnAtom> contents;
    bool coded = false;
};

namespace detail {

/// Expands (p, d, w) atoms into full capacity-carrying atoms with the d edge
/// capacities drawn i.i.d. from the marginal q (multiset multinomial weights).
inline std::vector<LawAtom> expand_caps_iid(const std::vector<CdnAtom>& atoms, const std::map<int, double>& q,
                                            std::function<int(const CdnAtom&)> vertex_cap) {
    std::vector<std::pair<int, double>> vals(q.begin(), q.end());
    std::vector<LawAtom> out;
    for (const CdnAtom& a : atoms) {
        std::vector<int> caps;
        auto rec = [&](auto&& self, std::size_t vi, int rem, double prob) -> void {
            if (vi + 1 == vals.size()) {
                double p = prob;
                for (int i = 0; i < rem; ++i) p *= vals[vi].second;
                caps.insert(caps.end(), static_cast<std::size_t>(rem), vals[vi].first);
                if (p > 0.0) out.push_back({a.p * p, a.d, vertex_cap(a), caps});
                caps.resize(caps.size() - static_cast<std::size_t>(rem));
                return;
            }
            for (int n = 0; n <= rem; ++n) {
                double p = prob * binom(rem, n);
                for (int i = 0; i < n; ++i) p *= vals[vi].second;
                caps.insert(caps.end(), static_cast<std::size_t>(n), vals[vi].first);
                self(self, vi + 1, rem - n, p);
                caps.resize(caps.size() - static_cast<std::size_t>(n));
            }
        };
        if (vals.empty() || a.d == 0) {
            out.push_back({a.p, a.d, vertex_cap(a), {}});
            if (a.d != 0) throw InconsistentLaws("positive degree but no edge-capacity values to draw from");
        } else {
            rec(rec, 0, a.d, 1.0);
        }
    }
    return out;
}

}  // namespace detail

/// Maps a scenario to the two vertex laws.
/// Uncoded: unbounded per-edge service is realized by one shared edge
/// capacity C* = max vertex capacity over both sides, which never binds.
/// Coded: content vertex capacity ω·l, every adjacent edge capacity ω;
/// server edge capacities follow the induced half-edge marginal.
inline std::pair<VertexLaw, VertexLaw> cdn_laws(const CdnScenario& s) {
    if (s.servers.empty() || s.contents.empty()) throw InvalidParams("scenario needs both server and content atoms");
    std::vector<LawAtom> server_atoms, content_atoms;
    if (!s.coded) {
        int cstar = 0;
        for (const CdnAtom& a : s.servers) cstar = std::max(cstar, a.w);
        for (const CdnAtom& a : s.contents) cstar = std::max(cstar, a.w);
        cstar = std::max(cstar, 1);
        for (const CdnAtom& a : s.servers)
            server_atoms.push_back({a.p, a.d, a.w, std::vector<int>(static_cast<std::size_t>(a.d), cstar)});
        for (const CdnAtom& a : s.contents)
            content_atoms.push_back({a.p, a.d, a.w, std::vector<int>(static_cast<std::size_t>(a.d), cstar)});
    } else {
        for (const CdnAtom& a : s.contents) {
            if (a.segments < 1) throw InvalidParams("coded contents need segments >= 1");
            content_atoms.push_back(
                {a.p, a.d, a.w * a.segments, std::vector<int>(static_cast<std::size_t>(a.d), a.w)});
        }
        VertexLaw phiB = VertexLaw::from_atoms(content_atoms);
        server_atoms = detail::expand_caps_iid(s.servers, edge_cap_freq(phiB), [](const CdnAtom& a) { return a.w; });
        VertexLaw phiA = VertexLaw::from_atoms(std::move(server_atoms));
        if (!check_consistency(phiA, phiB)) throw InconsistentLaws("mapped laws fail the consistency relation");
        return {std::move(phiA), std::move(phiB)};
    }
    VertexLaw phiA = VertexLaw::from_atoms(std::move(server_atoms));
    VertexLaw phiB = VertexLaw::from_atoms(std::move(content_atoms));
    if (!check_consistency(phiA, phiB)) throw InconsistentLaws("mapped laws fail the consistency relation");
    return {std::move(phiA), std::move(phiB)};
}

/// Asymptotic maximum absorbed load, in requests (uncoded) or fragments
/// (coded) per server.
inline LimitResult cdn_capacity(const CdnScenario& s) {
    auto [phiA, phiB] = cdn_laws(s);
    return limit_M(phiA, phiB);
}

}  // namespace capalloc

#endif
