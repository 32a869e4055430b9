#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "qg/exhaustion.hpp"
#include "qg/fem.hpp"
#include "qg/geometry.hpp"
#include "qg/pl_function.hpp"
#include "qg/surgery.hpp"

using namespace qg;
using namespace qg::test;

namespace {

/// Path with vertices at 1, 1/2, ..., 1/n.
MetricGraph harmonic_path(int n)
{
    std::vector<std::string> ids;
    std::vector<Edge> edges;
    for (int i = 1; i <= n; ++i) ids.push_back("x" + std::to_string(i));
    for (int i = 1; i < n; ++i)
        edges.push_back({"e" + std::to_string(i), static_cast<VertexIndex>(i - 1), static_cast<VertexIndex>(i),
                         1.0 / i - 1.0 / (i + 1)});
    return MetricGraph(ids, edges);
}

}  // namespace

TEST_SUITE("metric-geometry")
{
    TEST_CASE("total_length examples")
    {
        CHECK(total_length(star(3).graph) == doctest::Approx(3.0));
        CHECK(total_length(necklace(2, 0.25).graph) == doctest::Approx(1.0));
        const double limit = comb_limit_length(1.5);
        CHECK(limit == doctest::Approx(1.0 + 2.6123753486854883).epsilon(1e-14));
        const double truncated = total_length(comb(1.5, 10000).graph);
        // deficit: N^-1.5 plus the zeta tail 2 N^-1/2 - N^-3/2 / 2 + ...
        CHECK(truncated < limit);
        CHECK(limit - truncated == doctest::Approx(0.02 + 0.5e-6).epsilon(1e-6));
    }

    TEST_CASE("betti_number examples")
    {
        CHECK(betti_number(star(4).graph) == 0);
        CHECK(betti_number(loop().graph) == 1);
        CHECK(betti_number(MetricGraph({"v"}, {{"a", 0, 0, 1.0}, {"b", 0, 0, 1.0}})) == 2);
        CHECK_THROWS_AS(betti_number(MetricGraph({"a", "b"}, {})), InputError);
    }

    TEST_CASE("point_distance examples")
    {
        CHECK(point_distance(interval().graph, {0, 0.2}, {0, 0.9}) == doctest::Approx(0.7));
        CHECK(point_distance(loop().graph, {0, 0.1}, {0, 0.8}) == doctest::Approx(0.3));
        // arm 1 at 0.4 from its tip is 0.6 from the centre
        CHECK(point_distance(star(3).graph, {0, 0.6}, {1, 1.0}) == doctest::Approx(1.6));
    }

    TEST_CASE("property: point_distance is a metric")
    {
        std::mt19937_64 rng(3);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const MetricGraph g = make_family(random_pool_spec(seed)).graph;
            std::uniform_int_distribution<std::size_t> pick(0, g.edge_count() - 1);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            auto draw = [&] {
                const EdgeIndex e = pick(rng);
                return GraphPoint{e, u(rng) * g.edge(e).length};
            };
            for (int t = 0; t < 20; ++t) {
                const GraphPoint a = draw(), b = draw(), c = draw();
                CHECK(point_distance(g, a, b) == point_distance(g, b, a));
                CHECK(point_distance(g, a, c) <= point_distance(g, a, b) + point_distance(g, b, c) + 1e-12);
                CHECK(point_distance(g, a, a) == doctest::Approx(0.0));
            }
        }
    }

    TEST_CASE("diameter examples")
    {
        const DiameterEstimate s = diameter(star(3).graph, 1e-4);
        CHECK(s.value == doctest::Approx(2.0));
        CHECK(s.error <= 1e-4);

        const DiameterEstimate l = diameter(loop().graph, 1e-4);
        CHECK(l.value <= 0.5 + 1e-12);
        CHECK(l.upper() >= 0.5 - 1e-12);
        CHECK(l.value == doctest::Approx(0.5).epsilon(1e-4));

        const DiameterEstimate z = diameter(harmonic_path(50), 1e-4);
        CHECK(z.value == doctest::Approx(1.0 - 1.0 / 50).epsilon(1e-13));
        CHECK(total_length(harmonic_path(50)) == doctest::Approx(1.0 - 1.0 / 50).epsilon(1e-13));
    }

    TEST_CASE("property: diameter is monotone under refinement and bounded by L")
    {
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            const MetricGraph g = make_family(random_pool_spec(seed)).graph;
            double prev = 0.0;
            double prev_upper = 1e300;
            bool first = true;
            for (double delta : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
                const DiameterEstimate d = diameter(g, delta);
                CHECK(d.value >= prev - 1e-15);
                CHECK(d.value <= total_length(g) + 1e-12);
                if (!first) CHECK(d.value - prev <= delta * 2 + 1e-12);
                first = false;
                CHECK(d.upper() <= prev_upper + 1e-12);
                // the true value sits in every error bar
                CHECK(d.value <= prev_upper + 1e-12);
                prev = d.value;
                prev_upper = d.upper();
            }
        }
    }

    TEST_CASE("inradius examples")
    {
        CHECK(inradius(star(3, 0.7).graph, with_dirichlet_leaves(star(3, 0.7)).conditions) == doctest::Approx(0.7));
        const QuantumGraph t = with_dirichlet_leaves(star({1.0, 1.0, 0.5}));
        CHECK(inradius(t.graph, t.conditions) == doctest::Approx(0.75));
        const QuantumGraph i = with_dirichlet_leaves(interval());
        CHECK(inradius(i.graph, i.conditions) == doctest::Approx(0.5));
        CHECK_THROWS_AS(inradius(star(3).graph, star(3).conditions), InputError);
    }

    TEST_CASE("cheeger_sweep examples")
    {
        auto iv = shared(interval().graph);
        const PLFunction cosine = PLFunction::sample(iv, [](EdgeIndex, double x) { return std::cos(pi * x); }, 1000);
        CHECK(cheeger_sweep(cosine) == doctest::Approx(2.0).epsilon(1e-9));

        auto lp = shared(loop().graph);
        const PLFunction wave = PLFunction::sample(lp, [](EdgeIndex, double x) { return std::cos(2 * pi * x); }, 1000);
        CHECK(cheeger_sweep(wave) == doctest::Approx(4.0).epsilon(1e-9));

        auto st = shared(star(3).graph);
        const PLFunction anti = PLFunction::sample(
            st,
            [](EdgeIndex e, double x) { return e == 0 ? std::sin(pi * x / 2) : (e == 1 ? -std::sin(pi * x / 2) : 0.0); },
            1000);
        CHECK(cheeger_sweep(anti) == doctest::Approx(1.0).epsilon(1e-9));

        CHECK_THROWS_AS(cheeger_sweep(PLFunction::sample(iv, [](EdgeIndex, double) { return 1.0; }, 4)), InputError);
    }

    TEST_CASE("cheeger_exact_small examples")
    {
        CHECK(cheeger_exact_small(interval(3.0).graph, 2) == doctest::Approx(2.0 / 3.0));
        CHECK(cheeger_exact_small(loop(2.0).graph, 2) == doctest::Approx(2.0));
        CHECK(cheeger_exact_small(star(3).graph, 2) == doctest::Approx(1.0));
    }

    TEST_CASE("property: sweep on the second eigenfunction bounds the small-cut value from above")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const QuantumGraph q = make_family(random_pool_spec(seed));
            const FemSystem sys = assemble(mesh(q, 1e-2));
            const Spectrum sp = solve_eigs(sys, 2);
            const double sweep = cheeger_sweep(to_pl_function(sys.mesh, sp.eigenvectors.col(1)));
            const double exact = cheeger_exact_small(q.graph, 2);
            CHECK(sweep >= exact - 1e-9);
        }
    }

    TEST_CASE("annulus volumes on the interval")
    {
        const AnnulusVolumes a = annulus_volumes(interval().graph, 0, harmonic_radii(6));
        REQUIRE(a.volumes.size() == 6);
        for (int k = 1; k <= 6; ++k) CHECK(a.volumes[k - 1] == doctest::Approx(1.0 / k - 1.0 / (k + 1)).epsilon(1e-12));
        CHECK_FALSE(a.clipped);
        CHECK(annulus_volumes(interval(0.5).graph, 0, harmonic_radii(3)).clipped);
        CHECK_THROWS_AS(annulus_volumes(interval().graph, 0, {0.5, 1.0}), InputError);
    }

    TEST_CASE("annulus volumes on combs about the shaft end")
    {
        auto scaled = [](double alpha) {
            const QuantumGraph c = comb(alpha, 2000);
            const VertexIndex end = c.conditions.end_tags.begin()->first;
            const auto a = annulus_volumes(c.graph, end, harmonic_radii(8));
            std::vector<double> out;
            for (std::size_t k = 0; k < a.volumes.size(); ++k) out.push_back(static_cast<double>(k + 1) * a.volumes[k]);
            return out;
        };
        const auto fat = scaled(0.5);
        const auto thin = scaled(2.0);
        for (double v : fat) CHECK(v > 0.2);
        for (double v : thin) CHECK(v <= 1.0);
        // partial sums of r_k |A_k| with r_k = 1/k
        double sum = 0.0;
        for (std::size_t k = 0; k < thin.size(); ++k) {
            const double kk = static_cast<double>(k + 1);
            sum += thin[k] / (kk * kk);
        }
        CHECK(sum < 1.0);
        CHECK(thin.back() < fat.back());
    }

    TEST_CASE("property: diameter along a comb exhaustion is nondecreasing")
    {
        FamilySpec s;
        s.family = Family::diagonal_comb;
        s.alpha = 1.5;
        const auto ladder = truncation_ladder(s, {5, 10, 20, 40}, 1e-4);
        for (std::size_t i = 1; i < ladder.size(); ++i)
            CHECK(ladder[i].geometry.diameter.upper() >= ladder[i - 1].geometry.diameter.value - 1e-12);
    }

    TEST_CASE("geometry_report")
    {
        const QuantumGraph t = with_dirichlet_leaves(star({1.0, 1.0, 0.5}));
        const GeometryReport r = geometry_report(t.graph, t.conditions, 1e-4);
        CHECK(r.total_length == doctest::Approx(2.5));
        CHECK(r.diameter.value == doctest::Approx(2.0));
        CHECK(r.betti == 0);
        REQUIRE(r.inradius);
        CHECK(*r.inradius == doctest::Approx(0.75));
        CHECK_FALSE(geometry_report(loop().graph, {}, 1e-3).inradius);
    }
}
