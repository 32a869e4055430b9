#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qg/graph.hpp"
#include "qg/pl_function.hpp"

namespace qg {

/// A point of the metric graph: an edge and an offset from its `from` end.
/// Vertices have several representations (offset 0 or length on any
/// incident edge).
struct GraphPoint {
    EdgeIndex edge = 0;
    double offset = 0.0;
};

[[nodiscard]] double total_length(const MetricGraph& g);

/// |E| - |V| + 1; throws InputError on a disconnected graph.
[[nodiscard]] int betti_number(const MetricGraph& g);

/// Shortest-path distances from a set of weighted sources
/// (`initial[v]` = starting distance, infinity for non-sources).
[[nodiscard]] std::vector<double> vertex_distances(const MetricGraph& g, std::vector<double> initial);

/// Shortest-path distances from one vertex.
[[nodiscard]] std::vector<double> vertex_distances(const MetricGraph& g, VertexIndex source);

/// All-pairs vertex distance matrix.
[[nodiscard]] Eigen::MatrixXd vertex_distance_matrix(const MetricGraph& g);

/// Distances from an arbitrary point to every vertex.
[[nodiscard]] std::vector<double> distances_from_point(const MetricGraph& g, const GraphPoint& p);

[[nodiscard]] double point_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q);

/// Certified diameter: `value` is attained by actual points, and the true
/// diameter lies in [value, value + error].
struct DiameterEstimate {
    double value = 0.0;
    double error = 0.0;

    [[nodiscard]] double upper() const { return value + error; }
};

/// Per-edge grids are dyadic (2^j pieces), so halving the resolution
/// refines the grid and the estimate never decreases.
[[nodiscard]] DiameterEstimate diameter(const MetricGraph& g, double resolution);

/// Largest distance from a point of the graph to the effective Dirichlet
/// set. Throws InputError when that set is empty.
[[nodiscard]] double inradius(const MetricGraph& g, const ConditionAssignment& cond);

/// Level-set sweep of a function: the infimum over regular levels t of
/// n(t) / min(|{f < t}|, L - |{f < t}|). An upper bound for the Cheeger
/// constant h.
[[nodiscard]] double cheeger_sweep(const PLFunction& f);

/// Exact infimum of the Cheeger ratio over cuts with at most `max_cut_points`
/// boundary points (at most one per edge interior, vertex splits into two
/// groups of edge ends). Throws InputError when more than `budget` cut sets
/// would have to be enumerated.
[[nodiscard]] double cheeger_exact_small(const MetricGraph& g, int max_cut_points, std::size_t budget = 2'000'000);

struct AnnulusVolumes {
    std::vector<double> volumes;  ///< |{r[k+1] <= dist <= r[k]}|, k = 0..r.size()-2
    bool clipped = false;         ///< outermost radius exceeds the eccentricity of the centre
};

/// Exact annulus volumes about a vertex for a decreasing radius sequence.
[[nodiscard]] AnnulusVolumes annulus_volumes(const MetricGraph& g, VertexIndex centre, const std::vector<double>& radii);

/// Radii 1, 1/2, ..., 1/(k_max + 1).
[[nodiscard]] std::vector<double> harmonic_radii(int k_max);

struct GeometryReport {
    double total_length = 0.0;
    DiameterEstimate diameter;
    int betti = 0;
    std::optional<double> inradius;
};

[[nodiscard]] GeometryReport geometry_report(const MetricGraph& g, const ConditionAssignment& cond, double resolution);

}  // namespace qg
