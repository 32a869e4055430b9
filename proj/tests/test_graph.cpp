#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "qg/geometry.hpp"
#include "qg/io.hpp"
#include "qg/surgery.hpp"

using namespace qg;
using namespace qg::test;
using nlohmann::json;

namespace {

json vertex(const std::string& id, const char* cond = "standard")
{
    return {{"id", id}, {"condition", cond}, {"end", nullptr}};
}

json edge(const std::string& id, const std::string& a, const std::string& b, double len)
{
    return {{"id", id}, {"endpoints", {a, b}}, {"length", len}};
}

}  // namespace

TEST_SUITE("graph-core")
{
    TEST_CASE("build_from_json: single interval")
    {
        json doc{{"vertices", {vertex("v0"), vertex("v1")}}, {"edges", {edge("e0", "v0", "v1", 1.0)}}};
        QuantumGraph q = build_from_json(doc);
        CHECK(q.graph.vertex_count() == 2);
        CHECK(q.graph.edge_count() == 1);
        CHECK(total_length(q.graph) == doctest::Approx(1.0));
        CHECK_FALSE(q.conditions.has_dirichlet());
    }

    TEST_CASE("build_from_json: loop counts twice in the degree")
    {
        json doc{{"vertices", {vertex("v0")}}, {"edges", {edge("e0", "v0", "v0", 2.0)}}};
        QuantumGraph q = build_from_json(doc);
        CHECK(q.graph.degree(0) == 2);
        CHECK(betti_number(q.graph) == 1);
    }

    TEST_CASE("build_from_json: rejects bad input")
    {
        json neg{{"vertices", {vertex("v0"), vertex("v1")}}, {"edges", {edge("e0", "v0", "v1", -1.0)}}};
        CHECK_THROWS_WITH_AS(build_from_json(neg), doctest::Contains("nonpositive length"), InputError);

        json dangling{{"vertices", {vertex("v0")}}, {"edges", {edge("e0", "v0", "v9", 1.0)}}};
        CHECK_THROWS_AS(build_from_json(dangling), InputError);

        json dup{{"vertices", {vertex("v0"), vertex("v0")}}, {"edges", {edge("e0", "v0", "v0", 1.0)}}};
        CHECK_THROWS_AS(build_from_json(dup), InputError);

        json split{{"vertices", {vertex("a"), vertex("b"), vertex("c"), vertex("d")}},
                   {"edges", {edge("e0", "a", "b", 1.0), edge("e1", "c", "d", 1.0)}}};
        CHECK_THROWS_WITH_AS(build_from_json(split), doctest::Contains("disconnected"), InputError);

        json zero{{"vertices", {vertex("v0"), vertex("v1")}}, {"edges", {edge("e0", "v0", "v1", 0.0)}}};
        CHECK_THROWS_AS(build_from_json(zero), InputError);
    }

    TEST_CASE("build_from_json: conditions and round trip")
    {
        json doc{{"vertices", {vertex("c"), vertex("x1", "dirichlet"), vertex("x2")}},
                 {"edges", {edge("e1", "c", "x1", 1.0), edge("e2", "c", "x2", 0.5)}}};
        doc["vertices"][2]["end"] = "neumann";
        QuantumGraph q = build_from_json(doc);
        CHECK(q.conditions.dirichlet == std::set<VertexIndex>{1});
        CHECK(q.conditions.end_tags.at(2) == EndCondition::neumann);
        QuantumGraph back = build_from_json(to_json(q));
        CHECK(back.graph.edge_count() == 2);
        CHECK(back.conditions.dirichlet == q.conditions.dirichlet);
        CHECK(back.conditions.end_tags == q.conditions.end_tags);
    }

    TEST_CASE("make_family: star")
    {
        QuantumGraph q = star(3, 1.0);
        CHECK(q.graph.vertex_count() == 4);
        CHECK(q.graph.edge_count() == 3);
        CHECK(total_length(q.graph) == doctest::Approx(3.0));
        CHECK(betti_number(q.graph) == 0);
    }

    TEST_CASE("make_family: diagonal comb with three teeth")
    {
        QuantumGraph q = comb(0.5, 3);
        const double expected = (1.0 - 1.0 / std::sqrt(3.0)) + (1.0 + 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(3.0));
        CHECK(total_length(q.graph) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(expected == doctest::Approx(2.7071).epsilon(1e-4));
        CHECK(q.graph.edge(q.graph.edge_index("tooth2")).length == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(q.conditions.end_tags.size() == 1);
    }

    TEST_CASE("make_family: necklace of two pumpkins")
    {
        QuantumGraph q = necklace(2, 0.25);
        CHECK(total_length(q.graph) == doctest::Approx(1.0));
        CHECK(betti_number(q.graph) == 2);
    }

    TEST_CASE("make_family: unsupported parameters")
    {
        FamilySpec s;
        s.family = Family::star;
        s.arms = 0;
        CHECK_THROWS_AS(make_family(s), InputError);
        s = {};
        s.family = Family::interval;
        s.length = -1.0;
        CHECK_THROWS_AS(make_family(s), InputError);
        s = {};
        s.family = Family::random_compact;
        CHECK_THROWS_AS(make_family(s), InputError);  // no seed
        CHECK_THROWS_AS(parse_family("hypercube"), InputError);
    }

    TEST_CASE("property: builders are connected and match the analytic length")
    {
        std::vector<FamilySpec> specs;
        for (Family f : {Family::interval, Family::star, Family::loop, Family::necklace, Family::diagonal_comb,
                         Family::geometric_tree, Family::lasso}) {
            FamilySpec s;
            s.family = f;
            specs.push_back(s);
        }
        FamilySpec c;
        c.family = Family::diagonal_comb;
        c.alpha = 1.5;
        c.teeth = 500;
        specs.push_back(c);
        for (std::uint64_t seed = 0; seed < 20; ++seed) specs.push_back(random_pool_spec(seed));
        for (const auto& s : specs) {
            CAPTURE(to_string(s.family));
            QuantumGraph q = make_family(s);
            CHECK(q.graph.is_connected());
            CHECK(rel_diff(total_length(q.graph), family_total_length(s)) <= 1e-12);
        }
    }

    TEST_CASE("property: random_compact is reproducible and within the pool limits")
    {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const FamilySpec s = random_pool_spec(seed);
            const QuantumGraph a = make_family(s);
            const QuantumGraph b = make_family(s);
            REQUIRE(a.graph.edge_count() == b.graph.edge_count());
            for (std::size_t e = 0; e < a.graph.edge_count(); ++e) {
                CHECK(a.graph.edge(e).length == b.graph.edge(e).length);
                CHECK(a.graph.edge(e).from == b.graph.edge(e).from);
                CHECK(a.graph.edge(e).to == b.graph.edge(e).to);
                CHECK(a.graph.edge(e).length >= 0.3);
                CHECK(a.graph.edge(e).length <= 2.0);
            }
            CHECK(a.graph.edge_count() <= 8);
            CHECK(betti_number(a.graph) == s.beta);
            CHECK(s.beta <= 2);
        }
    }

    TEST_CASE("insert_dummy: interval split")
    {
        QuantumGraph q = insert_dummy(interval(1.0), 0, 0.3);
        CHECK(q.graph.edge_count() == 2);
        CHECK(q.graph.edge(0).length == doctest::Approx(0.3));
        CHECK(q.graph.edge(1).length == doctest::Approx(0.7));
        CHECK(total_length(q.graph) == doctest::Approx(1.0));
    }

    TEST_CASE("insert_dummy: loop becomes a pumpkin")
    {
        QuantumGraph q = insert_dummy(loop(2.0), 0, 1.0);
        REQUIRE(q.graph.edge_count() == 2);
        CHECK(q.graph.vertex_count() == 2);
        for (const Edge& e : q.graph.edges()) {
            CHECK_FALSE(e.is_loop());
            CHECK(e.length == doctest::Approx(1.0));
        }
        CHECK(betti_number(q.graph) == 1);
    }

    TEST_CASE("insert_dummy: boundary positions rejected")
    {
        CHECK_THROWS_AS(insert_dummy(interval(1.0), 0, 0.0), InputError);
        CHECK_THROWS_AS(insert_dummy(interval(1.0), 0, 1.0), InputError);
    }

    TEST_CASE("property: insert_dummy then merge preserves length, Betti number and diameter")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            QuantumGraph q = make_family(random_pool_spec(seed));
            const double len = q.graph.edge(0).length;
            QuantumGraph split = insert_dummy(q, 0, 0.37 * len);
            QuantumGraph merged = merge_dummy(split, split.graph.vertex_count() - 1);
            CHECK(std::abs(total_length(merged.graph) - total_length(q.graph)) <= 1e-12);
            CHECK(betti_number(merged.graph) == betti_number(q.graph));
            CHECK(std::abs(diameter(merged.graph, 1e-3).value - diameter(q.graph, 1e-3).value) <= 1e-12);
        }
    }

    TEST_CASE("cut_vertex: loop opens to an interval")
    {
        QuantumGraph l = loop(1.0);
        const auto& inc = l.graph.incident(0);
        REQUIRE(inc.size() == 2);
        CutResult r = cut_vertex(l, 0, {{inc[0]}, {inc[1]}});
        CHECK_FALSE(r.disconnected);
        CHECK(r.cuts == 1);
        CHECK(r.graph.graph.vertex_count() == 2);
        CHECK(betti_number(r.graph.graph) == 0);
        CHECK(total_length(r.graph.graph) == doctest::Approx(1.0));
    }

    TEST_CASE("cut_vertex: figure-eight and star centre separate")
    {
        MetricGraph eight({"v"}, {{"a", 0, 0, 1.0}, {"b", 0, 0, 1.0}});
        QuantumGraph q{eight, {}};
        const auto& inc = eight.incident(0);
        std::vector<EdgeEnd> first, second;
        for (const EdgeEnd& end : inc) (end.edge == 0 ? first : second).push_back(end);
        CHECK(cut_vertex(q, 0, {first, second}).disconnected);

        QuantumGraph s = star(3);
        const auto& sc = s.graph.incident(0);
        CutResult r = cut_vertex(s, 0, {{sc[0]}, {sc[1], sc[2]}});
        CHECK(r.disconnected);
        CHECK(r.graph.graph.component_count() == 2);
    }

    TEST_CASE("cut_vertex: invalid partitions")
    {
        QuantumGraph s = star(3);
        const auto& sc = s.graph.incident(0);
        CHECK_THROWS_AS(cut_vertex(s, 0, {{sc[0], sc[1], sc[2]}}), InputError);
        CHECK_THROWS_AS(cut_vertex(s, 0, {{sc[0]}, {sc[1]}}), InputError);
        CHECK_THROWS_AS(cut_vertex(s, 0, {{sc[0]}, {}, {sc[1], sc[2]}}), InputError);
    }

    TEST_CASE("property: cut then glue restores the Betti number")
    {
        QuantumGraph n = necklace(2, 0.25);
        const VertexIndex mid = n.graph.vertex_index("p1");
        const auto& inc = n.graph.incident(mid);
        REQUIRE(inc.size() == 4);
        // pair one edge of each pumpkin so the cut keeps the graph connected
        std::vector<EdgeEnd> left, right;
        for (const EdgeEnd& e : inc) {
            const std::string& id = n.graph.edge(e.edge).id;
            (id == "a0" || id == "a1" ? left : right).push_back(e);
        }
        REQUIRE(left.size() == 2);
        CutResult r = cut_vertex(n, mid, {left, right});
        REQUIRE_FALSE(r.disconnected);
        CHECK(betti_number(r.graph.graph) == betti_number(n.graph) - 1);
        const std::size_t vc = r.graph.graph.vertex_count();
        QuantumGraph glued = glue_vertices(r.graph, mid, vc - 1);
        CHECK(betti_number(glued.graph) == betti_number(n.graph));
        CHECK(total_length(glued.graph) == doctest::Approx(1.0));
    }

    TEST_CASE("attach_pendant examples")
    {
        MetricGraph stick({"r", "t"}, {{"s", 0, 1, 0.5}});
        QuantumGraph path = attach_pendant(interval(1.0), 1, stick, 0);
        CHECK(total_length(path.graph) == doctest::Approx(1.5));
        CHECK(diameter(path.graph, 1e-4).value == doctest::Approx(1.5));

        QuantumGraph lasso = attach_pendant(loop(1.0), 0, star(2).graph, 0);
        CHECK(betti_number(lasso.graph) == 1);
        CHECK(total_length(lasso.graph) == doctest::Approx(3.0));

        CHECK_THROWS_AS(attach_pendant(interval(1.0), 7, stick, 0), InputError);
        CHECK_THROWS_AS(attach_pendant(interval(1.0), 0, loop(1.0).graph, 0), InputError);
    }

    TEST_CASE("glue_vertices examples")
    {
        QuantumGraph l = glue_vertices(interval(1.0), 0, 1);
        CHECK(l.graph.vertex_count() == 1);
        CHECK(l.graph.edge(0).is_loop());
        CHECK(betti_number(l.graph) == 1);

        QuantumGraph s = star(3);
        QuantumGraph lasso = glue_vertices(s, s.graph.vertex_index("x1"), s.graph.vertex_index("x2"));
        CHECK(betti_number(lasso.graph) == 1);

        CHECK_THROWS_AS(glue_vertices(s, 1, 1), InputError);
    }

    TEST_CASE("conditions: validation and rules")
    {
        QuantumGraph q = comb(1.5, 5, EndCondition::dirichlet);
        CHECK(q.conditions.has_dirichlet());
        ConditionAssignment n = q.conditions.with_boundary_rule(EndCondition::neumann);
        CHECK_FALSE(n.has_dirichlet());
        CHECK_FALSE(q.conditions.standard_only().has_dirichlet());

        ConditionAssignment bad;
        bad.dirichlet.insert(0);
        bad.end_tags[0] = EndCondition::neumann;
        CHECK_THROWS_AS(bad.validate(interval(1.0).graph), InputError);
        ConditionAssignment out_of_range;
        out_of_range.dirichlet.insert(5);
        CHECK_THROWS_AS(out_of_range.validate(interval(1.0).graph), InputError);
    }
}
