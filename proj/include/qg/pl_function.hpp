#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "qg/graph.hpp"

namespace qg {

/// Continuous piecewise-linear function on a compact metric graph. Each edge
/// carries strictly increasing offsets from 0 to the edge length and the
/// function values at those offsets.
class PLFunction {
public:
    struct EdgeProfile {
        std::vector<double> x;
        std::vector<double> y;
    };

    PLFunction(std::shared_ptr<const MetricGraph> graph, std::vector<EdgeProfile> profiles);

    /// Samples `f(edge, offset)` on a uniform grid with `segments` pieces per edge.
    static PLFunction sample(std::shared_ptr<const MetricGraph> graph,
                             const std::function<double(EdgeIndex, double)>& f, int segments);

    /// f on the interval [0, length] given by breakpoints and values.
    static PLFunction on_interval(std::vector<double> x, std::vector<double> y);

    [[nodiscard]] const MetricGraph& graph() const { return *graph_; }
    [[nodiscard]] std::shared_ptr<const MetricGraph> graph_ptr() const { return graph_; }
    [[nodiscard]] const std::vector<EdgeProfile>& profiles() const { return profiles_; }
    [[nodiscard]] double min() const { return min_; }
    [[nodiscard]] double max() const { return max_; }
    [[nodiscard]] double total_length() const;

    [[nodiscard]] double value(EdgeIndex e, double offset) const;

    /// Sorted distinct node values (every breakpoint, vertices included).
    [[nodiscard]] std::vector<double> critical_values() const;

    [[nodiscard]] double l2_norm_squared() const;
    [[nodiscard]] double dirichlet_energy() const;

private:
    std::shared_ptr<const MetricGraph> graph_;
    std::vector<EdgeProfile> profiles_;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Level-set data of f at level t.
struct LevelData {
    double level = 0.0;
    std::size_t count = 0;        ///< isolated points with f = t (plateaus excluded)
    double sublevel_measure = 0;  ///< |{f < t}|
    bool regular = true;          ///< false at vertex values and plateau values
};

[[nodiscard]] LevelData level_data(const PLFunction& f, double t);

/// |{f <= t}|.
[[nodiscard]] double sublevel_measure_closed(const PLFunction& f, double t);

/// Nondecreasing rearrangement on [0, L]: |{f* < t}| = |{f < t}| for every t.
[[nodiscard]] PLFunction rearrange(const PLFunction& f);

struct CavalieriCheck {
    double lhs = 0.0;  ///< integral of f^2 over the graph
    double rhs = 0.0;  ///< integral of (f*)^2 over [0, L]
    double difference = 0.0;
};

[[nodiscard]] CavalieriCheck check_cavalieri(const PLFunction& f);

struct PolyaCheck {
    double energy = 0.0;             ///< integral of |f'|^2 over the graph
    double rearranged_energy = 0.0;  ///< integral of |f*'|^2 over [0, L]
    std::size_t min_count = 0;       ///< essential infimum of n(t) over (min f, max f)
    double scaled = 0.0;             ///< min_count^2 * rearranged_energy
    double ratio = std::numeric_limits<double>::infinity();  ///< energy / scaled
};

[[nodiscard]] PolyaCheck check_polya(const PLFunction& f);

/// Essential infimum of the level-set count, from one regular level between
/// each pair of consecutive critical values.
[[nodiscard]] std::size_t min_level_count(const PLFunction& f);

struct CoareaCheck {
    double lhs = 0.0;  ///< integral of phi |f'| over the graph
    double rhs = 0.0;  ///< integral over t of the sum of phi on the level set
    double difference = 0.0;
};

/// `weight` must live on the same graph as `f`; it is evaluated pointwise.
[[nodiscard]] CoareaCheck check_coarea(const PLFunction& f, const PLFunction& weight);

}  // namespace qg
