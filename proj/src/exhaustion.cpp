#include "qg/exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>

#include "qg/parallel.hpp"

namespace qg {

QuantumGraph combinatorial_ball(const QuantumGraph& q, VertexIndex root, int n)
{
    const MetricGraph& g = q.graph;
    if (root >= g.vertex_count()) throw InputError("ball root out of range");
    if (n < 0) throw InputError("ball radius must be nonnegative");

    std::vector<int> hops(g.vertex_count(), -1);
    std::deque<VertexIndex> queue{root};
    hops[root] = 0;
    while (!queue.empty()) {
        const VertexIndex v = queue.front();
        queue.pop_front();
        if (hops[v] == n) continue;
        for (const EdgeEnd& end : g.incident(v)) {
            const Edge& e = g.edge(end.edge);
            const VertexIndex w = end.at_start ? e.to : e.from;
            if (hops[w] < 0) {
                hops[w] = hops[v] + 1;
                queue.push_back(w);
            }
        }
    }

    std::vector<VertexIndex> remap(g.vertex_count(), g.vertex_count());
    std::vector<std::string> ids;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (hops[v] < 0) continue;
        remap[v] = ids.size();
        ids.push_back(g.vertex_id(v));
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
        if (hops[e.from] >= 0 && hops[e.to] >= 0) edges.push_back({e.id, remap[e.from], remap[e.to], e.length});

    ConditionAssignment cond;
    for (VertexIndex v : q.conditions.dirichlet)
        if (hops[v] >= 0) cond.dirichlet.insert(remap[v]);
    for (const auto& [v, c] : q.conditions.end_tags)
        if (hops[v] >= 0) cond.end_tags[remap[v]] = c;
    return {MetricGraph(std::move(ids), std::move(edges)), std::move(cond)};
}

std::vector<ExhaustionStep> truncation_ladder(const FamilySpec& spec, const std::vector<int>& sizes, double resolution)
{
    if (spec.family != Family::diagonal_comb && spec.family != Family::geometric_tree)
        throw InputError("family '" + to_string(spec.family) + "' has no truncation parameter");
    if (sizes.empty()) throw InputError("truncation ladder needs at least one size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw InputError("truncation sizes must be strictly increasing");

    std::vector<ExhaustionStep> out;
    for (int size : sizes) {
        FamilySpec s = spec;
        (spec.family == Family::diagonal_comb ? s.teeth : s.generations) = size;
        s.validate();
        ExhaustionStep step;
        step.index = size;
        step.graph = make_family(s);
        for (const auto& [v, c] : step.graph.conditions.end_tags) step.boundary.push_back(v);
        step.geometry.total_length = family_total_length(s);
        step.geometry.betti = betti_number(step.graph.graph);
        if (resolution > 0.0) step.geometry.diameter = diameter(step.graph.graph, resolution);
        out.push_back(std::move(step));
    }
    return out;
}

bool is_nested(const std::vector<ExhaustionStep>& ladder)
{
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        const MetricGraph& outer = ladder[i].graph.graph;
        for (const Edge& e : ladder[i - 1].graph.graph.edges()) {
            const auto f = outer.find_edge(e.id);
            if (!f || outer.edge(*f).length != e.length) return false;
        }
    }
    return true;
}

std::vector<double> ConvergenceTable::sequence(std::size_t k) const
{
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.k == k) out.push_back(r.eigenvalue);
    return out;
}

ConvergenceTable convergence_study(const std::vector<ExhaustionStep>& ladder, EndCondition rule,
                                   const StudySettings& settings)
{
    struct StepResult {
        std::optional<Spectrum> spectrum;
        std::string error;
    };
    auto results = parallel_map(ladder.size(), [&](std::size_t i) {
        StepResult r;
        QuantumGraph q = ladder[i].graph;
        q.conditions = q.conditions.with_boundary_rule(rule);
        try {
            r.spectrum = settings.extrapolate
                             ? solve_extrapolated(q, settings.k_max, settings.mesh_h, settings.dof_cap, settings.solver)
                             : solve_fem(q, settings.k_max, settings.mesh_h, settings.dof_cap, settings.solver);
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
        return r;
    });

    ConvergenceTable table;
    table.boundary_rule = rule;
    table.eigen_tol = settings.eigen_tol;
    for (std::size_t i = 0; i < ladder.size(); ++i)
        if (!results[i].spectrum) table.failures.emplace_back(ladder[i].index, results[i].error);

    for (std::size_t k = 1; k <= settings.k_max; ++k) {
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const auto& sp = results[i].spectrum;
            if (!sp) continue;
            table.rows.push_back({ladder[i].index, k, (*sp)[k - 1], sp->method, sp->mesh_h, rule});
        }
        const auto seq = table.sequence(k);
        std::size_t violations = 0;
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (seq[i] - seq[i - 1] > 10.0 * settings.eigen_tol * std::max(std::abs(seq[i - 1]), 1e-12)) ++violations;
        table.monotonicity_violations.push_back(violations);
        table.cauchy_tail.push_back(seq.size() >= 2 ? std::abs(seq.back() - seq[seq.size() - 2])
                                                    : std::numeric_limits<double>::quiet_NaN());
    }
    return table;
}

void write_csv(std::ostream& out, const ConvergenceTable& table)
{
    out << "n,k,eigenvalue,method,mesh_h,boundary_rule\n";
    const auto old = out.precision(17);
    for (const auto& r : table.rows)
        out << r.n << ',' << r.k << ',' << r.eigenvalue << ',' << to_string(r.method) << ',' << r.mesh_h << ','
            << to_string(r.boundary_rule) << '\n';
    out.precision(old);
}

}  // namespace qg
