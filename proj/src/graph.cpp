#include "qg/graph.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>

namespace qg {

MetricGraph::MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges)
    : vertex_ids_(std::move(vertex_ids)), edges_(std::move(edges)), incidence_(vertex_ids_.size())
{
    for (VertexIndex v = 0; v < vertex_ids_.size(); ++v) {
        if (!vertex_lookup_.emplace(vertex_ids_[v], v).second)
            throw InputError("duplicate vertex id '" + vertex_ids_[v] + "'");
    }
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (!edge_lookup_.emplace(ed.id, e).second)
            throw InputError("duplicate edge id '" + ed.id + "'");
        if (ed.from >= vertex_ids_.size() || ed.to >= vertex_ids_.size())
            throw InputError("edge '" + ed.id + "' references a missing vertex");
        if (!std::isfinite(ed.length))
            throw InputError("edge '" + ed.id + "' has non-finite length");
        if (ed.length <= 0.0)
            throw InputError("edge '" + ed.id + "' has nonpositive length");
        incidence_[ed.from].push_back({e, true});
        incidence_[ed.to].push_back({e, false});
    }
}

std::optional<VertexIndex> MetricGraph::find_vertex(const std::string& id) const
{
    auto it = vertex_lookup_.find(id);
    if (it == vertex_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<EdgeIndex> MetricGraph::find_edge(const std::string& id) const
{
    auto it = edge_lookup_.find(id);
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

VertexIndex MetricGraph::vertex_index(const std::string& id) const
{
    if (auto v = find_vertex(id)) return *v;
    throw InputError("unknown vertex id '" + id + "'");
}

EdgeIndex MetricGraph::edge_index(const std::string& id) const
{
    if (auto e = find_edge(id)) return *e;
    throw InputError("unknown edge id '" + id + "'");
}

std::vector<std::size_t> MetricGraph::component_labels() const
{
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(vertex_count(), unset);
    std::size_t next = 0;
    std::vector<VertexIndex> stack;
    for (VertexIndex s = 0; s < vertex_count(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexIndex v = stack.back();
            stack.pop_back();
            for (const EdgeEnd& end : incidence_[v]) {
                const Edge& ed = edges_[end.edge];
                VertexIndex w = end.at_start ? ed.to : ed.from;
                if (label[w] == unset) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

std::size_t MetricGraph::component_count() const
{
    auto labels = component_labels();
    std::size_t count = 0;
    for (auto l : labels) count = std::max(count, l + 1);
    return count;
}

void MetricGraph::require_connected() const
{
    if (vertex_count() == 0) throw InputError("graph has no vertices");
    if (!is_connected()) throw InputError("graph is disconnected");
}

std::string to_string(EndCondition c)
{
    return c == EndCondition::neumann ? "neumann" : "dirichlet";
}

EndCondition parse_end_condition(const std::string& s)
{
    if (s == "neumann") return EndCondition::neumann;
    if (s == "dirichlet") return EndCondition::dirichlet;
    throw InputError("unknown end condition '" + s + "'");
}

bool ConditionAssignment::is_dirichlet(VertexIndex v) const
{
    if (dirichlet.count(v)) return true;
    auto it = end_tags.find(v);
    return it != end_tags.end() && it->second == EndCondition::dirichlet;
}

std::set<VertexIndex> ConditionAssignment::dirichlet_set() const
{
    std::set<VertexIndex> out = dirichlet;
    for (const auto& [v, c] : end_tags)
        if (c == EndCondition::dirichlet) out.insert(v);
    return out;
}

void ConditionAssignment::validate(const MetricGraph& g) const
{
    for (VertexIndex v : dirichlet)
        if (v >= g.vertex_count()) throw InputError("dirichlet vertex out of range");
    for (const auto& [v, c] : end_tags) {
        if (v >= g.vertex_count()) throw InputError("end-tagged vertex out of range");
        if (c == EndCondition::neumann && dirichlet.count(v))
            throw InputError("vertex '" + g.vertex_id(v) + "' is both dirichlet and a neumann end");
    }
}

ConditionAssignment ConditionAssignment::with_boundary_rule(EndCondition rule) const
{
    ConditionAssignment out = *this;
    for (auto& [v, c] : out.end_tags) {
        c = rule;
        if (rule == EndCondition::neumann) out.dirichlet.erase(v);
    }
    return out;
}

ConditionAssignment ConditionAssignment::standard_only() const
{
    ConditionAssignment out = with_boundary_rule(EndCondition::neumann);
    out.dirichlet.clear();
    return out;
}

}  // namespace qg
