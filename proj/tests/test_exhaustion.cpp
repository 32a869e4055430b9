#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "qg/exhaustion.hpp"

using namespace qg;
using namespace qg::test;

namespace {

FamilySpec comb_spec(double alpha, EndCondition end = EndCondition::neumann)
{
    FamilySpec s;
    s.family = Family::diagonal_comb;
    s.alpha = alpha;
    s.end_condition = end;
    return s;
}

/// Euler-Maclaurin estimate of sum_{k > n} k^{-a}.
double zeta_tail(double a, double n)
{
    return std::pow(n, 1 - a) / (a - 1) - 0.5 * std::pow(n, -a) + a / 12.0 * std::pow(n, -a - 1) -
           a * (a + 1) * (a + 2) / 720.0 * std::pow(n, -a - 3);
}

}  // namespace

TEST_SUITE("exhaustion")
{
    TEST_CASE("combinatorial_ball examples")
    {
        FamilySpec t;
        t.family = Family::geometric_tree;
        t.branches = 2;
        t.generations = 4;
        const QuantumGraph tree = make_family(t);
        const QuantumGraph b2 = combinatorial_ball(tree, 0, 2);
        CHECK(b2.graph.vertex_count() == 7);
        CHECK(b2.graph.edge_count() == 6);

        std::vector<std::string> ids;
        std::vector<Edge> edges;
        for (int i = 0; i < 9; ++i) ids.push_back("p" + std::to_string(i));
        for (VertexIndex i = 0; i + 1 < 9; ++i) edges.push_back({"e" + std::to_string(i), i, i + 1, 1.0});
        const QuantumGraph path{MetricGraph(ids, edges), {}};
        CHECK(combinatorial_ball(path, 4, 3).graph.edge_count() == 6);
        CHECK(combinatorial_ball(path, 0, 3).graph.edge_count() == 3);

        const QuantumGraph b0 = combinatorial_ball(tree, 0, 0);
        CHECK(b0.graph.vertex_count() == 1);
        CHECK(b0.graph.edge_count() == 0);
        CHECK_THROWS_AS(combinatorial_ball(tree, 999, 1), InputError);
    }

    TEST_CASE("property: balls are nested and eventually cover the graph")
    {
        const QuantumGraph q = make_family(random_pool_spec(5));
        std::size_t prev = 0;
        for (int n = 0; n <= static_cast<int>(q.graph.vertex_count()); ++n) {
            const QuantumGraph b = combinatorial_ball(q, 0, n);
            CHECK(b.graph.edge_count() >= prev);
            for (const Edge& e : b.graph.edges()) CHECK(q.graph.find_edge(e.id).has_value());
            prev = b.graph.edge_count();
        }
        CHECK(prev == q.graph.edge_count());
    }

    TEST_CASE("truncation_ladder: comb lengths increase toward 1 + zeta(1.5)")
    {
        const auto ladder = truncation_ladder(comb_spec(1.5), {10, 20, 40});
        REQUIRE(ladder.size() == 3);
        CHECK(is_nested(ladder));
        const double limit = comb_limit_length(1.5);
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            CHECK(ladder[i].geometry.total_length < limit);
            if (i > 0) CHECK(ladder[i].geometry.total_length > ladder[i - 1].geometry.total_length);
            CHECK(ladder[i].boundary.size() == 1);
        }
    }

    TEST_CASE("property: comb length deficit matches the analytic tail")
    {
        const double a = 1.5;
        const auto ladder = truncation_ladder(comb_spec(a), {100, 200, 400, 800});
        for (const auto& step : ladder) {
            const double n = step.index;
            const double deficit = comb_limit_length(a) - step.geometry.total_length;
            CHECK(std::abs(deficit - (std::pow(n, -a) + zeta_tail(a, n))) < 1e-10);
        }
    }

    TEST_CASE("truncation_ladder: trees have Betti number zero")
    {
        FamilySpec t;
        t.family = Family::geometric_tree;
        t.branches = 2;
        t.ratio = 0.4;
        const auto ladder = truncation_ladder(t, {3, 4, 5, 6, 7, 8});
        CHECK(is_nested(ladder));
        for (const auto& step : ladder) {
            CHECK(step.geometry.betti == 0);
            CHECK(step.boundary.size() == (std::size_t{1} << step.index));
        }
    }

    TEST_CASE("truncation_ladder: errors")
    {
        CHECK_THROWS_AS(truncation_ladder(comb_spec(1.5), {40, 20}), InputError);
        CHECK_THROWS_AS(truncation_ladder(comb_spec(1.5), {20, 20}), InputError);
        FamilySpec s;
        s.family = Family::star;
        CHECK_THROWS_AS(truncation_ladder(s, {1, 2}), InputError);
    }

    TEST_CASE("property: Betti numbers along a ladder are nondecreasing")
    {
        for (const auto& spec : {comb_spec(0.5), comb_spec(2.0)}) {
            const auto ladder = truncation_ladder(spec, {2, 4, 8, 16});
            for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(ladder[i].geometry.betti >= ladder[i - 1].geometry.betti);
        }
    }

    TEST_CASE("convergence_study: Dirichlet ladder on the comb is nonincreasing")
    {
        const auto ladder = truncation_ladder(comb_spec(1.5), {10, 20, 40, 80});
        StudySettings st;
        st.k_max = 3;
        st.mesh_h = 5e-3;
        const ConvergenceTable t = convergence_study(ladder, EndCondition::dirichlet, st);
        CHECK(t.failures.empty());
        REQUIRE(t.rows.size() == 12);
        for (std::size_t i = 1; i < t.rows.size(); ++i) {
            const auto& a = t.rows[i - 1];
            const auto& b = t.rows[i];
            CHECK((a.k < b.k || (a.k == b.k && a.n < b.n)));
        }
        for (std::size_t k = 1; k <= 3; ++k) {
            CHECK(t.monotonicity_violations[k - 1] == 0);
            const auto seq = t.sequence(k);
            for (double v : seq) CHECK(v >= 0.0);
        }
        std::ostringstream csv;
        write_csv(csv, t);
        CHECK(csv.str().rfind("n,k,eigenvalue,method,mesh_h,boundary_rule\n", 0) == 0);
    }

    TEST_CASE("convergence_study: standard rule on the comb, mu_2 nonincreasing")
    {
        const auto ladder = truncation_ladder(comb_spec(1.5), {10, 20, 40, 80});
        StudySettings st;
        st.k_max = 2;
        st.mesh_h = 5e-3;
        const ConvergenceTable t = convergence_study(ladder, EndCondition::neumann, st);
        CHECK(t.monotonicity_violations[1] == 0);
        const auto mu1 = t.sequence(1);
        for (double v : mu1) CHECK(v == 0.0);
    }

    TEST_CASE("convergence_study: single step and recorded failures")
    {
        StudySettings st;
        st.k_max = 2;
        st.mesh_h = 1e-2;
        const auto one = convergence_study(truncation_ladder(comb_spec(1.5), {10}), EndCondition::dirichlet, st);
        CHECK(one.rows.size() == 2);
        CHECK(one.monotonicity_violations == std::vector<std::size_t>{0, 0});

        StudySettings greedy;
        greedy.k_max = 30;
        greedy.mesh_h = 0.5;
        greedy.extrapolate = false;
        const auto t = convergence_study(truncation_ladder(comb_spec(1.5), {1, 200}), EndCondition::dirichlet, greedy);
        REQUIRE(t.failures.size() == 1);
        CHECK(t.failures.front().first == 1);
        CHECK(t.sequence(1).size() == 1);
    }
}
