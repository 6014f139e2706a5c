#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "capalloc/io.hpp"

using namespace capalloc;
using nlohmann::json;

namespace {

json parse(const std::string& text) { return detail::parse_json(text, "test"); }

}  // namespace

TEST_CASE("graph parsing and round-trip", "[io]") {
    json j = parse(R"({
      "vertices": [{"id": "u", "b": 2, "side": "A"}, {"id": "v", "b": 3, "side": "B"}, {"id": "w", "b": 1, "side": "A"}],
      "edges": [{"u": "u", "v": "v", "c": 2}, {"u": "v", "v": "w", "c": 1}]
    })");
    CapGraph g = parse_graph(j);
    REQUIRE(g.num_vertices() == 3);
    REQUIRE(g.num_edges() == 2);
    CHECK(g.vertex(0).id == "u");
    CHECK(g.vertex(0).b == 2);
    CHECK(g.vertex(0).side == Side::A);
    CHECK(g.edge(0).c == 2);

    // sides are all-or-none; undeclared sides parse too
    CapGraph bare = parse_graph(parse(R"({
      "vertices": [{"id": "u", "b": 1}, {"id": "v", "b": 1}],
      "edges": [{"u": "u", "v": "v", "c": 1}]
    })"));
    CHECK(bare.vertex(0).side == Side::None);
    CHECK_THROWS_AS(parse_graph(parse(R"({
      "vertices": [{"id": "u", "b": 1, "side": "A"}, {"id": "v", "b": 1}],
      "edges": []
    })")),
                    ParseError);

    CapGraph again = parse_graph(graph_to_json(g));
    REQUIRE(again.num_vertices() == g.num_vertices());
    REQUIRE(again.num_edges() == g.num_edges());
    for (int v = 0; v < g.num_vertices(); ++v) {
        CHECK(again.vertex(v).id == g.vertex(v).id);
        CHECK(again.vertex(v).b == g.vertex(v).b);
        CHECK(again.vertex(v).side == g.vertex(v).side);
    }
    for (int e = 0; e < g.num_edges(); ++e) {
        CHECK(again.edge(e).u == g.edge(e).u);
        CHECK(again.edge(e).v == g.edge(e).v);
        CHECK(again.edge(e).c == g.edge(e).c);
    }
}

TEST_CASE("unbounded edge capacity is clamped to the endpoint bound", "[io]") {
    json j = parse(R"({
      "vertices": [{"id": "u", "b": 2}, {"id": "v", "b": 5}],
      "edges": [{"u": "u", "v": "v", "c": "inf"}]
    })");
    CapGraph g = parse_graph(j);
    CHECK(g.edge(0).c == 2);  // min(b_u, b_v): an allocation can never use more

    json bad = parse(R"({
      "vertices": [{"id": "u", "b": 2}, {"id": "v", "b": 5}],
      "edges": [{"u": "u", "v": "v", "c": "lots"}]
    })");
    CHECK_THROWS_AS(parse_graph(bad), ParseError);
}

TEST_CASE("graph parse errors", "[io]") {
    CHECK_THROWS_AS(parse_graph(parse(R"({"vertices": []})")), ParseError);
    CHECK_THROWS_AS(parse_graph(parse(R"([1, 2])")), ParseError);
    CHECK_THROWS_AS(detail::parse_json("{not json", "test"), ParseError);

    // unknown keys are rejected at every level
    CHECK_THROWS_AS(parse_graph(parse(R"({"vertices": [], "edges": [], "extra": 1})")), ParseError);
    CHECK_THROWS_AS(parse_graph(parse(R"({"vertices": [{"id": "u", "b": 1, "colour": 2}], "edges": []})")),
                    ParseError);
    CHECK_THROWS_AS(
        parse_graph(parse(
            R"({"vertices": [{"id":"u","b":1},{"id":"v","b":1}], "edges": [{"u":"u","v":"v","c":1,"z":0}]})")),
        ParseError);

    // semantic failures surface as parse errors with context
    CHECK_THROWS_AS(parse_graph(parse(R"({"vertices": [{"id":"u","b":1},{"id":"u","b":2}], "edges": []})")),
                    ParseError);
    CHECK_THROWS_AS(
        parse_graph(parse(R"({"vertices": [{"id":"u","b":1}], "edges": [{"u":"u","v":"x","c":1}]})")),
        ParseError);
    CHECK_THROWS_AS(parse_graph(parse(R"({"vertices": [{"id":"u","b":1,"side":"C"}], "edges": []})")), ParseError);
}

TEST_CASE("law parsing", "[io]") {
    VertexLaw atoms = parse_law(parse(R"({"atoms": [{"p": 0.5, "d": 2, "w": 1, "caps": [1, 2]},
                                                    {"p": 0.5, "d": 0, "w": 3, "caps": []}]})"));
    REQUIRE(atoms.atoms().size() == 2);
    CHECK(atoms.atoms()[0].caps == std::vector<int>{1, 2});

    VertexLaw pois = parse_law(parse(R"({"poisson": {"rate": 1.5, "w": 2, "cap": 1}})"));
    CHECK_THAT(pois.mean_degree(), Catch::Matchers::WithinAbs(1.5, 1e-9));
    CHECK(pois.max_w() == 2);

    // atoms and poisson are mutually exclusive, and one is required
    CHECK_THROWS_AS(parse_law(parse(R"({"atoms": [], "poisson": {"rate": 1, "w": 1, "cap": 1}})")), ParseError);
    CHECK_THROWS_AS(parse_law(parse(R"({})")), ParseError);
    CHECK_THROWS_AS(parse_law(parse(R"({"atoms": [{"p": 1.0, "d": 1, "w": 1}]})")), ParseError);
    CHECK_THROWS_AS(parse_law(parse(R"({"atoms": [{"p": 1.0, "d": 1, "w": 1, "caps": [1], "x": 0}]})")),
                    ParseError);
    CHECK_THROWS_AS(parse_law(parse(R"({"atoms": [{"p": 1.0, "d": 2, "w": 1, "caps": [1]}]})")), ParseError);
}

TEST_CASE("scenario parsing", "[io]") {
    CdnScenario s = parse_scenario(parse(R"({
      "coded": true,
      "servers": {"atoms": [{"p": 1.0, "d": 2, "w": 1}]},
      "contents": {"atoms": [{"p": 1.0, "d": 2, "w": 1, "segments": 3}]}
    })"));
    CHECK(s.coded);
    REQUIRE(s.servers.size() == 1);
    REQUIRE(s.contents.size() == 1);
    CHECK(s.contents[0].segments == 3);
    CHECK(s.servers[0].segments == 1);

    CdnScenario plain = parse_scenario(parse(R"({
      "servers": {"atoms": [{"p": 1.0, "d": 1, "w": 1}]},
      "contents": {"atoms": [{"p": 1.0, "d": 1, "w": 1}]}
    })"));
    CHECK_FALSE(plain.coded);

    CHECK_THROWS_AS(parse_scenario(parse(R"({"servers": {"atoms": []}})")), ParseError);
    // segments are a content-side field only
    CHECK_THROWS_AS(parse_scenario(parse(R"({
      "servers": {"atoms": [{"p": 1.0, "d": 1, "w": 1, "segments": 2}]},
      "contents": {"atoms": [{"p": 1.0, "d": 1, "w": 1}]}
    })")),
                    ParseError);
}

TEST_CASE("file loading reports missing paths", "[io]") {
    CHECK_THROWS_AS(load_graph("/nonexistent/graph.json"), ParseError);
    CHECK_THROWS_AS(load_law("/nonexistent/law.json"), ParseError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST_CASE("CSV rendering", "[io]") {
    CHECK(csv_real(0.5) == "0.5");
    CHECK(csv_real(1.0 / 3.0) == "0.333333333333");
    CHECK(csv_real(2e-9) == "2e-09");
    CHECK(csv_row({"a", "1", "0.5"}) == "a,1,0.5");
    CHECK(csv_row({}) == "");
}
