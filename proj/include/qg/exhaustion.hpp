#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qg/families.hpp"
#include "qg/fem.hpp"
#include "qg/geometry.hpp"
#include "qg/graph.hpp"

namespace qg {

/// Induced subgraph on the vertices within combinatorial (hop) distance `n`
/// of `root`. Edge and vertex ids are kept; conditions are restricted.
[[nodiscard]] QuantumGraph combinatorial_ball(const QuantumGraph& q, VertexIndex root, int n);

struct GeometrySnapshot {
    double total_length = 0.0;
    DiameterEstimate diameter;
    int betti = 0;
};

struct ExhaustionStep {
    int index = 0;  ///< truncation size (teeth or generations)
    QuantumGraph graph;
    std::vector<VertexIndex> boundary;  ///< end-tagged vertices
    GeometrySnapshot geometry;
};

/// Nested truncations of a comb (sizes = tooth counts) or geometric tree
/// (sizes = generations). Boundary vertices carry `spec.end_condition`.
/// Throws InputError for other families or sizes that are not strictly
/// increasing. A positive `resolution` also computes the diameter.
[[nodiscard]] std::vector<ExhaustionStep> truncation_ladder(const FamilySpec& spec, const std::vector<int>& sizes,
                                                            double resolution = 0.0);

/// Every step's edge ids are contained in the next step's, with equal lengths.
[[nodiscard]] bool is_nested(const std::vector<ExhaustionStep>& ladder);

struct StudySettings {
    std::size_t k_max = 1;
    double mesh_h = 1e-3;
    std::size_t dof_cap = kDefaultDofCap;
    bool extrapolate = true;
    double eigen_tol = 1e-8;  ///< relative accuracy assumed for each eigenvalue
    SolverSettings solver;
};

struct ConvergenceRow {
    int n = 0;
    std::size_t k = 0;  ///< 1-based
    double eigenvalue = 0.0;
    SpectrumMethod method = SpectrumMethod::fem;
    double mesh_h = 0.0;
    EndCondition boundary_rule = EndCondition::dirichlet;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  ///< sorted by (k, n)
    std::vector<std::pair<int, std::string>> failures;  ///< step index, message
    std::vector<double> cauchy_tail;   ///< per k: |value(last) - value(previous)|
    std::vector<std::size_t> monotonicity_violations;  ///< per k
    EndCondition boundary_rule = EndCondition::dirichlet;
    double eigen_tol = 0.0;

    /// Values of eigenvalue k (1-based) in ladder order.
    [[nodiscard]] std::vector<double> sequence(std::size_t k) const;
};

/// Solves every step under the given boundary rule and tabulates the first
/// k_max eigenvalues. A step whose solve fails is recorded and skipped.
/// An increase between consecutive steps larger than 10 * eigen_tol
/// (relative) counts as a monotonicity violation.
[[nodiscard]] ConvergenceTable convergence_study(const std::vector<ExhaustionStep>& ladder, EndCondition rule,
                                                 const StudySettings& settings);

/// CSV with columns n,k,eigenvalue,method,mesh_h,boundary_rule.
void write_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace qg
