#pragma once

#include <string>
#include <vector>

#include "qg/graph.hpp"

namespace qg {

/// Splits `edge` at `position` (strictly inside the edge) with a new
/// degree-2 standard vertex. The first piece keeps the edge's slot.
[[nodiscard]] QuantumGraph insert_dummy(const QuantumGraph& q, EdgeIndex edge, double position);

/// Inverse of insert_dummy: fuses the two edges of a degree-2 non-loop
/// standard vertex into one.
[[nodiscard]] QuantumGraph merge_dummy(const QuantumGraph& q, VertexIndex v);

/// Removes every removable degree-2 standard vertex.
[[nodiscard]] QuantumGraph merge_all_dummies(const QuantumGraph& q);

struct CutResult {
    QuantumGraph graph;
    bool disconnected = false;
    int cuts = 0;  // number of blocks minus one
};

/// Replaces `v` by one vertex per block of `partition`. Blocks must be
/// nonempty, disjoint, and together cover the edge ends at `v`.
[[nodiscard]] CutResult cut_vertex(const QuantumGraph& q, VertexIndex v, const std::vector<std::vector<EdgeEnd>>& partition);

/// Identifies the root of `tree` with `v`. Ids of the attached part are
/// prefixed with `prefix`.
[[nodiscard]] QuantumGraph attach_pendant(const QuantumGraph& q, VertexIndex v, const MetricGraph& tree, VertexIndex root,
                                          const std::string& prefix = "t.");

/// Merges `w` into `v`. A Dirichlet condition on either survives.
[[nodiscard]] QuantumGraph glue_vertices(const QuantumGraph& q, VertexIndex v, VertexIndex w);

/// Deletes an edge; endpoints left isolated are deleted too.
[[nodiscard]] QuantumGraph remove_edge(const QuantumGraph& q, EdgeIndex e);

}  // namespace qg
