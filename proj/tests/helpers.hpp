#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "qg/families.hpp"
#include "qg/graph.hpp"

namespace qg::test {

inline constexpr double pi = std::numbers::pi;
inline constexpr double pi2 = pi * pi;

inline double rel_diff(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline QuantumGraph interval(double length = 1.0)
{
    FamilySpec s;
    s.family = Family::interval;
    s.length = length;
    return make_family(s);
}

inline QuantumGraph loop(double length = 1.0)
{
    FamilySpec s;
    s.family = Family::loop;
    s.length = length;
    return make_family(s);
}

inline QuantumGraph star(int arms, double arm_length = 1.0)
{
    FamilySpec s;
    s.family = Family::star;
    s.arms = arms;
    s.arm_length = arm_length;
    return make_family(s);
}

inline QuantumGraph star(std::vector<double> lengths)
{
    FamilySpec s;
    s.family = Family::star;
    s.lengths = std::move(lengths);
    return make_family(s);
}

inline QuantumGraph necklace(int pumpkins, double edge_length)
{
    FamilySpec s;
    s.family = Family::necklace;
    s.pumpkins = pumpkins;
    s.edge_length = edge_length;
    return make_family(s);
}

inline QuantumGraph comb(double alpha, int teeth, EndCondition end = EndCondition::neumann)
{
    FamilySpec s;
    s.family = Family::diagonal_comb;
    s.alpha = alpha;
    s.teeth = teeth;
    s.end_condition = end;
    return make_family(s);
}

/// Marks every degree-one vertex as Dirichlet.
inline QuantumGraph with_dirichlet_leaves(QuantumGraph q)
{
    for (VertexIndex v = 0; v < q.graph.vertex_count(); ++v)
        if (q.graph.degree(v) == 1) q.conditions.dirichlet.insert(v);
    return q;
}

inline QuantumGraph with_dirichlet(QuantumGraph q, const std::string& id)
{
    q.conditions.dirichlet.insert(q.graph.vertex_index(id));
    return q;
}

inline std::shared_ptr<const MetricGraph> shared(const MetricGraph& g)
{
    return std::make_shared<const MetricGraph>(g);
}

}  // namespace qg::test
