#ifndef CAPALLOC_IO_HPP
#define CAPALLOC_IO_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "capalloc/cdn.hpp"
#include "capalloc/errors.hpp"
#include "capalloc/graph.hpp"
#include "capalloc/laws.hpp"

namespace capalloc {

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(std::string(where) + ": unknown key \"" + key + "\"");
    }
}

inline json parse_json(const std::string& text, const char* where) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(std::string(where) + ": malformed document");
    return j;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path.c_str());
}

}  // namespace detail

inline CapGraph parse_graph(const nlohmann::json& j) {
    using detail::reject_unknown;
    reject_unknown(j, {"vertices", "edges"}, "graph");
    if (!j.contains("vertices") || !j.contains("edges")) throw ParseError("graph: vertices and edges are required");
    CapGraph::Builder b;
    std::map<std::string, int> ids;
    for (const auto& v : j.at("vertices")) {
        reject_unknown(v, {"id", "b", "side"}, "vertex");
        if (!v.contains("id") || !v.contains("b")) throw ParseError("vertex: id and b are required");
        std::string id = v.at("id").get<std::string>();
        Side side = Side::None;
        if (v.contains("side")) {
            std::string s = v.at("side").get<std::string>();
            if (s == "A") side = Side::A;
            else if (s == "B") side = Side::B;
            else throw ParseError("vertex side must be \"A\" or \"B\"");
        }
        if (ids.count(id)) throw ParseError("duplicate vertex id \"" + id + "\"");
        ids[id] = b.add_vertex(id, v.at("b").get<int>(), side);
    }
    for (const auto& e : j.at("edges")) {
        reject_unknown(e, {"u", "v", "c"}, "edge");
        if (!e.contains("u") || !e.contains("v") || !e.contains("c")) throw ParseError("edge: u, v, c are required");
        auto vertex_of = [&ids](const nlohmann::json& x) {
            std::string id = x.get<std::string>();
            auto it = ids.find(id);
            if (it == ids.end()) throw ParseError("edge references unknown vertex \"" + id + "\"");
            return it->second;
        };
        int c;
        if (e.at("c").is_string()) {
            if (e.at("c").get<std::string>() != "inf") throw ParseError("edge capacity must be an integer or \"inf\"");
            c = kInfCap;
        } else {
            c = e.at("c").get<int>();
        }
        b.add_edge(vertex_of(e.at("u")), vertex_of(e.at("v")), c);
    }
    try {
        return std::move(b).build();
    } catch (const Error& err) {
        throw ParseError(std::string("graph: ") + err.what());
    }
}

inline CapGraph load_graph(const std::string& path) { return parse_graph(detail::load_json(path)); }

inline nlohmann::json graph_to_json(const CapGraph& g) {
    nlohmann::json verts = nlohmann::json::array(), edges = nlohmann::json::array();
    for (int v = 0; v < g.num_vertices(); ++v) {
        nlohmann::json jv{{"id", g.vertex(v).id}, {"b", g.vertex(v).b}};
        if (g.vertex(v).side != Side::None) jv["side"] = g.vertex(v).side == Side::A ? "A" : "B";
        verts.push_back(std::move(jv));
    }
    for (int e = 0; e < g.num_edges(); ++e)
        edges.push_back({{"u", g.vertex(g.edge(e).u).id}, {"v", g.vertex(g.edge(e).v).id}, {"c", g.edge(e).c}});
    return nlohmann::json{{"vertices", std::move(verts)}, {"edges", std::move(edges)}};
}

inline VertexLaw parse_law(const nlohmann::json& j) {
    using detail::reject_unknown;
    reject_unknown(j, {"atoms", "poisson"}, "law");
    if (j.contains("atoms") == j.contains("poisson"))
        throw ParseError("law: exactly one of atoms / poisson is required");
    if (j.contains("poisson")) {
        const auto& p = j.at("poisson");
        reject_unknown(p, {"rate", "w", "cap", "trunc"}, "poisson");
        if (!p.contains("rate") || !p.contains("w") || !p.contains("cap"))
            throw ParseError("poisson: rate, w, cap are required");
        double trunc = p.contains("trunc") ? p.at("trunc").get<double>() : 1e-12;
        return VertexLaw::poisson(p.at("rate").get<double>(), p.at("w").get<int>(), p.at("cap").get<int>(), trunc);
    }
    std::vector<LawAtom> atoms;
    for (const auto& a : j.at("atoms")) {
        reject_unknown(a, {"p", "d", "w", "caps"}, "atom");
        if (!a.contains("p") || !a.contains("d") || !a.contains("w") || !a.contains("caps"))
            throw ParseError("atom: p, d, w, caps are required");
        atoms.push_back({a.at("p").get<double>(), a.at("d").get<int>(), a.at("w").get<int>(),
                         a.at("caps").get<std::vector<int>>()});
    }
    try {
        return VertexLaw::from_atoms(std::move(atoms));
    } catch (const Error& err) {
        throw ParseError(std::string("law: ") + err.what());
    }
}

inline VertexLaw load_law(const std::string& path) { return parse_law(detail::load_json(path)); }

inline CdnScenario parse_scenario(const nlohmann::json& j) {
    using detail::reject_unknown;
    reject_unknown(j, {"coded", "servers", "contents"}, "scenario");
    if (!j.contains("servers") || !j.contains("contents"))
        throw ParseError("scenario: servers and contents are required");
    CdnScenario s;
    s.coded = j.contains("coded") && j.at("coded").get<bool>();
    auto parse_side = [&s](const nlohmann::json& side, bool contents) {
        reject_unknown(side, {"atoms"}, contents ? "contents" : "servers");
        if (!side.contains("atoms")) throw ParseError("scenario side: atoms are required");
        std::vector<CdnAtom> out;
        for (const auto& a : side.at("atoms")) {
            if (contents) reject_unknown(a, {"p", "d", "w", "segments"}, "content atom");
            else reject_unknown(a, {"p", "d", "w"}, "server atom");
            if (!a.contains("p") || !a.contains("d") || !a.contains("w"))
                throw ParseError("scenario atom: p, d, w are required");
            CdnAtom atom{a.at("p").get<double>(), a.at("d").get<int>(), a.at("w").get<int>(), 1};
            if (contents && a.contains("segments")) atom.segments = a.at("segments").get<int>();
            out.push_back(atom);
        }
        return out;
    };
    s.servers = parse_side(j.at("servers"), false);
    s.contents = parse_side(j.at("contents"), true);
    return s;
}

inline CdnScenario load_scenario(const std::string& path) { return parse_scenario(detail::load_json(path)); }

/// 12-significant-digit rendering used for all CSV reals.
inline std::string csv_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

}  // namespace capalloc

#endif
