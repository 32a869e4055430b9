#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace qg {

/// Malformed input: bad lengths, dangling ids, unsupported parameters.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (non-convergence, indefinite mass).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Edge {
    std::string id;
    VertexIndex from = 0;
    VertexIndex to = 0;
    double length = 0.0;

    [[nodiscard]] bool is_loop() const { return from == to; }
};

/// One end of an edge as seen from a vertex. `at_start` is true when the
/// vertex is the edge's `from` endpoint (offset 0).
struct EdgeEnd {
    EdgeIndex edge = 0;
    bool at_start = true;

    friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
    friend auto operator<=>(const EdgeEnd&, const EdgeEnd&) = default;
};

/// Finite metric graph: vertices carry string ids, edges carry positive
/// lengths. Loops appear twice in the incidence list of their vertex.
///
/// The graph is immutable once built; every surgery operation returns a new
/// graph. Connectivity is not enforced by the constructor because surgery can
/// legitimately produce disconnected results; callers that need it call
/// `require_connected()`.
class MetricGraph {
public:
    MetricGraph() = default;

    /// Builds a graph from vertex ids and edges referring to vertex indices.
    /// Throws InputError on duplicate ids, dangling endpoints or bad lengths.
    MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges);

    [[nodiscard]] std::size_t vertex_count() const { return vertex_ids_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }

    [[nodiscard]] const std::string& vertex_id(VertexIndex v) const { return vertex_ids_.at(v); }
    [[nodiscard]] const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
    [[nodiscard]] const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<EdgeEnd>& incident(VertexIndex v) const { return incidence_.at(v); }

    /// Degree with loops counted twice.
    [[nodiscard]] std::size_t degree(VertexIndex v) const { return incidence_.at(v).size(); }

    [[nodiscard]] std::optional<VertexIndex> find_vertex(const std::string& id) const;
    [[nodiscard]] std::optional<EdgeIndex> find_edge(const std::string& id) const;
    [[nodiscard]] VertexIndex vertex_index(const std::string& id) const;
    [[nodiscard]] EdgeIndex edge_index(const std::string& id) const;

    /// Component label per vertex, labels numbered from 0 in order of first
    /// appearance.
    [[nodiscard]] std::vector<std::size_t> component_labels() const;
    [[nodiscard]] std::size_t component_count() const;
    [[nodiscard]] bool is_connected() const { return component_count() <= 1; }
    void require_connected() const;

private:
    std::vector<std::string> vertex_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeEnd>> incidence_;
    std::unordered_map<std::string, VertexIndex> vertex_lookup_;
    std::unordered_map<std::string, EdgeIndex> edge_lookup_;
};

enum class EndCondition { neumann, dirichlet };

[[nodiscard]] std::string to_string(EndCondition c);
[[nodiscard]] EndCondition parse_end_condition(const std::string& s);

/// Vertex conditions: the Dirichlet set plus end tags on truncation-boundary
/// vertices. A vertex tagged as a Dirichlet end is part of the effective
/// Dirichlet set; a Neumann end carries the standard condition.
struct ConditionAssignment {
    std::set<VertexIndex> dirichlet;
    std::map<VertexIndex, EndCondition> end_tags;

    [[nodiscard]] bool is_dirichlet(VertexIndex v) const;
    [[nodiscard]] std::set<VertexIndex> dirichlet_set() const;
    [[nodiscard]] bool has_dirichlet() const { return !dirichlet_set().empty(); }

    /// Checks ids against the graph and the dirichlet/neumann-end exclusivity.
    void validate(const MetricGraph& g) const;

    /// Same tags, all truncation boundaries forced to `rule`.
    [[nodiscard]] ConditionAssignment with_boundary_rule(EndCondition rule) const;
    /// Drops every Dirichlet vertex and turns Dirichlet ends into Neumann ends.
    [[nodiscard]] ConditionAssignment standard_only() const;
};

/// A graph together with its vertex conditions.
struct QuantumGraph {
    MetricGraph graph;
    ConditionAssignment conditions;
};

}  // namespace qg
