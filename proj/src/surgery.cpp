#include "qg/surgery.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qg/geometry.hpp"

namespace qg {

namespace {

std::string fresh_vertex_id(const MetricGraph& g, const std::string& base)
{
    if (!g.find_vertex(base)) return base;
    for (int i = 1;; ++i) {
        std::string id = base + "#" + std::to_string(i);
        if (!g.find_vertex(id)) return id;
    }
}

std::string fresh_edge_id(const MetricGraph& g, const std::string& base)
{
    if (!g.find_edge(base)) return base;
    for (int i = 1;; ++i) {
        std::string id = base + "#" + std::to_string(i);
        if (!g.find_edge(id)) return id;
    }
}

/// Drops the vertices in `dead` and renumbers everything else.
QuantumGraph drop_vertices(const std::vector<std::string>& ids, std::vector<Edge> edges, const ConditionAssignment& cond,
                           const std::set<VertexIndex>& dead)
{
    std::vector<VertexIndex> remap(ids.size(), 0);
    std::vector<std::string> kept;
    for (VertexIndex v = 0; v < ids.size(); ++v) {
        if (dead.count(v)) continue;
        remap[v] = kept.size();
        kept.push_back(ids[v]);
    }
    for (Edge& e : edges) {
        e.from = remap[e.from];
        e.to = remap[e.to];
    }
    ConditionAssignment out;
    for (VertexIndex v : cond.dirichlet)
        if (!dead.count(v)) out.dirichlet.insert(remap[v]);
    for (const auto& [v, c] : cond.end_tags)
        if (!dead.count(v)) out.end_tags[remap[v]] = c;
    return {MetricGraph(std::move(kept), std::move(edges)), std::move(out)};
}

}  // namespace

QuantumGraph insert_dummy(const QuantumGraph& q, EdgeIndex edge, double position)
{
    const MetricGraph& g = q.graph;
    const Edge& target = g.edge(edge);
    if (!(position > 0.0 && position < target.length))
        throw InputError("dummy position must lie strictly inside the edge");
    std::vector<std::string> ids = g.vertex_ids();
    std::vector<Edge> edges = g.edges();
    ids.push_back(fresh_vertex_id(g, target.id + "@"));
    const VertexIndex mid = ids.size() - 1;
    edges[edge] = {fresh_edge_id(g, target.id + ".a"), target.from, mid, position};
    edges.push_back({fresh_edge_id(g, target.id + ".b"), mid, target.to, target.length - position});
    return {MetricGraph(std::move(ids), std::move(edges)), q.conditions};
}

QuantumGraph merge_dummy(const QuantumGraph& q, VertexIndex v)
{
    const MetricGraph& g = q.graph;
    const auto& inc = g.incident(v);
    if (inc.size() != 2 || inc[0].edge == inc[1].edge)
        throw InputError("vertex '" + g.vertex_id(v) + "' is not a degree-2 non-loop vertex");
    if (q.conditions.is_dirichlet(v) || q.conditions.end_tags.count(v))
        throw InputError("vertex '" + g.vertex_id(v) + "' carries a condition");
    auto far = [&](const EdgeEnd& end) {
        const Edge& e = g.edge(end.edge);
        return end.at_start ? e.to : e.from;
    };
    const EdgeEnd a = inc[0], b = inc[1];
    std::vector<Edge> edges;
    const EdgeIndex keep = std::min(a.edge, b.edge), drop = std::max(a.edge, b.edge);
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        if (e == drop) continue;
        if (e == keep) {
            const EdgeEnd& first = (a.edge == keep) ? a : b;
            const EdgeEnd& second = (a.edge == keep) ? b : a;
            edges.push_back({g.edge(keep).id, far(first), far(second), g.edge(a.edge).length + g.edge(b.edge).length});
        } else {
            edges.push_back(g.edge(e));
        }
    }
    return drop_vertices(g.vertex_ids(), std::move(edges), q.conditions, {v});
}

QuantumGraph merge_all_dummies(const QuantumGraph& q)
{
    QuantumGraph cur = q;
    for (bool changed = true; changed;) {
        changed = false;
        for (VertexIndex v = 0; v < cur.graph.vertex_count(); ++v) {
            const auto& inc = cur.graph.incident(v);
            if (inc.size() == 2 && inc[0].edge != inc[1].edge && !cur.conditions.is_dirichlet(v) &&
                !cur.conditions.end_tags.count(v)) {
                cur = merge_dummy(cur, v);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

CutResult cut_vertex(const QuantumGraph& q, VertexIndex v, const std::vector<std::vector<EdgeEnd>>& partition)
{
    const MetricGraph& g = q.graph;
    if (v >= g.vertex_count()) throw InputError("cut_vertex: vertex out of range");
    if (partition.size() < 2) throw InputError("cut_vertex: partition must have at least two blocks");
    std::vector<EdgeEnd> expected = g.incident(v);
    std::vector<EdgeEnd> seen;
    for (const auto& block : partition) {
        if (block.empty()) throw InputError("cut_vertex: empty block");
        seen.insert(seen.end(), block.begin(), block.end());
    }
    std::sort(expected.begin(), expected.end());
    std::sort(seen.begin(), seen.end());
    if (seen != expected) throw InputError("cut_vertex: partition does not match the edge ends at the vertex");

    std::vector<std::string> ids = g.vertex_ids();
    std::vector<Edge> edges = g.edges();
    ConditionAssignment cond = q.conditions;
    for (std::size_t b = 1; b < partition.size(); ++b) {
        std::string id = g.vertex_id(v) + "#" + std::to_string(b);
        while (std::find(ids.begin(), ids.end(), id) != ids.end()) id += "'";
        ids.push_back(id);
        const VertexIndex nv = ids.size() - 1;
        if (cond.is_dirichlet(v)) cond.dirichlet.insert(nv);
        for (const EdgeEnd& end : partition[b]) {
            if (end.at_start) edges[end.edge].from = nv;
            else edges[end.edge].to = nv;
        }
    }
    CutResult out{{MetricGraph(std::move(ids), std::move(edges)), std::move(cond)}, false,
                  static_cast<int>(partition.size()) - 1};
    out.disconnected = !out.graph.graph.is_connected();
    return out;
}

QuantumGraph attach_pendant(const QuantumGraph& q, VertexIndex v, const MetricGraph& tree, VertexIndex root,
                            const std::string& prefix)
{
    const MetricGraph& g = q.graph;
    if (v >= g.vertex_count()) throw InputError("attach_pendant: vertex out of range");
    if (root >= tree.vertex_count()) throw InputError("attach_pendant: root out of range");
    if (!tree.is_connected() || betti_number(tree) != 0) throw InputError("attach_pendant: attached graph is not a tree");

    std::vector<std::string> ids = g.vertex_ids();
    std::vector<Edge> edges = g.edges();
    std::vector<VertexIndex> remap(tree.vertex_count());
    for (VertexIndex w = 0; w < tree.vertex_count(); ++w) {
        if (w == root) {
            remap[w] = v;
            continue;
        }
        ids.push_back(prefix + tree.vertex_id(w));
        remap[w] = ids.size() - 1;
    }
    for (const Edge& e : tree.edges()) edges.push_back({prefix + e.id, remap[e.from], remap[e.to], e.length});
    return {MetricGraph(std::move(ids), std::move(edges)), q.conditions};
}

QuantumGraph glue_vertices(const QuantumGraph& q, VertexIndex v, VertexIndex w)
{
    const MetricGraph& g = q.graph;
    if (v >= g.vertex_count() || w >= g.vertex_count()) throw InputError("glue_vertices: vertex out of range");
    if (v == w) throw InputError("glue_vertices: cannot glue a vertex to itself");
    std::vector<Edge> edges = g.edges();
    for (Edge& e : edges) {
        if (e.from == w) e.from = v;
        if (e.to == w) e.to = v;
    }
    ConditionAssignment cond = q.conditions;
    if (cond.is_dirichlet(w)) cond.dirichlet.insert(v);
    cond.dirichlet.erase(w);
    cond.end_tags.erase(w);
    if (cond.dirichlet.count(v)) {
        auto it = cond.end_tags.find(v);
        if (it != cond.end_tags.end() && it->second == EndCondition::neumann) cond.end_tags.erase(it);
    }
    return drop_vertices(g.vertex_ids(), std::move(edges), cond, {w});
}

QuantumGraph remove_edge(const QuantumGraph& q, EdgeIndex e)
{
    const MetricGraph& g = q.graph;
    const Edge& gone = g.edge(e);
    std::vector<Edge> edges;
    for (EdgeIndex i = 0; i < g.edge_count(); ++i)
        if (i != e) edges.push_back(g.edge(i));
    std::set<VertexIndex> dead;
    for (VertexIndex end : {gone.from, gone.to}) {
        std::size_t remaining = 0;
        for (const Edge& ed : edges) remaining += (ed.from == end) + (ed.to == end);
        if (remaining == 0) dead.insert(end);
    }
    return drop_vertices(g.vertex_ids(), std::move(edges), q.conditions, dead);
}

}  // namespace qg
