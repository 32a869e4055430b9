#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qg/eigensolver.hpp"
#include "qg/graph.hpp"
#include "qg/pl_function.hpp"
#include "qg/spectrum.hpp"

namespace qg {

inline constexpr std::size_t kDefaultDofCap = 200'000;

/// P1 mesh of a quantum graph. Mesh nodes are the graph vertices followed by
/// the interior nodes of every edge, edge by edge. Nodes at Dirichlet
/// vertices are eliminated; the remaining ones are numbered as free DOFs.
struct FemMesh {
    std::shared_ptr<const MetricGraph> graph;
    ConditionAssignment conditions;
    std::vector<int> segments;            ///< subintervals per edge, each >= 2
    std::vector<std::size_t> edge_offset; ///< node index of the first interior node of each edge
    std::vector<std::ptrdiff_t> free_index; ///< node -> free DOF, -1 when eliminated
    std::size_t node_count = 0;
    std::size_t free_count = 0;
    double h_target = 0.0;
    bool capped = false;                  ///< the DOF cap forced a coarser mesh

    /// Node `j` (0..segments[e]) along edge `e`.
    [[nodiscard]] std::size_t node(EdgeIndex e, int j) const;
    /// Local element width on edge `e`.
    [[nodiscard]] double width(EdgeIndex e) const;
    /// Largest element width over the mesh.
    [[nodiscard]] double max_width() const;
};

/// Builds a mesh with max(2, ceil(l_e / h)) subintervals per edge. When the
/// node count would exceed `dof_cap`, h is enlarged until it fits and the
/// mesh is marked `capped`. Throws InputError when h <= 0 or the cap cannot
/// hold two subintervals per edge.
[[nodiscard]] FemMesh mesh(const QuantumGraph& q, double h_target, std::size_t dof_cap = kDefaultDofCap);

/// Same graph with every element bisected.
[[nodiscard]] FemMesh bisect(const FemMesh& m);

struct FemSystem {
    FemMesh mesh;
    SparseMatrix K;  ///< stiffness over free DOFs
    SparseMatrix M;  ///< mass over free DOFs
};

[[nodiscard]] FemSystem assemble(const FemMesh& m);

/// Element-wise mass restricted to the edges with `in_tail[e]` set.
[[nodiscard]] SparseMatrix partial_mass(const FemMesh& m, const std::vector<bool>& in_tail);

struct SolverSettings {
    std::size_t dense_threshold = 400;  ///< free DOFs at or below use the dense path
    /// Relative residual ||K u - lambda M u||_* / ||K u||_* every reported
    /// pair must meet, with ||r||_* = sqrt(r^T (K + M)^{-1} r).
    double residual_limit = 1e-9;
    PencilSettings pencil;
};

/// The `count` smallest eigenpairs of K u = lambda M u. Components without
/// a Dirichlet node contribute exact zero eigenvalues with constant
/// eigenvectors. Throws SolverError on non-convergence or when a pair misses
/// the residual limit.
[[nodiscard]] Spectrum solve_eigs(const FemSystem& s, std::size_t count, const SolverSettings& settings = {});

/// (4 lambda_{h/2} - lambda_h) / 3 per index. Eigenvectors and residuals are
/// taken from the finer spectrum. Differing multiplicity structure is
/// flagged, not fatal. Throws InputError when the counts differ.
[[nodiscard]] Spectrum richardson(const Spectrum& coarse, const Spectrum& fine);

/// Mesh, solve at h and h/2 on the bisected mesh, extrapolate.
[[nodiscard]] Spectrum solve_extrapolated(const QuantumGraph& q, std::size_t count, double h,
                                          std::size_t dof_cap = kDefaultDofCap, const SolverSettings& settings = {});

/// Plain P1 spectrum at mesh width h.
[[nodiscard]] Spectrum solve_fem(const QuantumGraph& q, std::size_t count, double h,
                                 std::size_t dof_cap = kDefaultDofCap, const SolverSettings& settings = {});

/// u^T K u / u^T M u for a free-DOF vector. Throws InputError for u = 0.
[[nodiscard]] double rayleigh(const FemSystem& s, const Eigen::VectorXd& u);

/// Free-DOF vector interpolating f(edge, offset).
[[nodiscard]] Eigen::VectorXd interpolate(const FemMesh& m, const std::function<double(EdgeIndex, double)>& f);

/// Continuous piecewise-linear function with the nodal values of `u`
/// (eliminated nodes are zero).
[[nodiscard]] PLFunction to_pl_function(const FemMesh& m, const Eigen::VectorXd& u);

struct TailIndicator {
    double sigma = 0.0;
    bool trivial = false;  ///< the core covers the whole graph
    bool capped = false;
};

/// Largest share of L^2 mass outside the core over the discrete H^1 unit
/// ball: the top eigenvalue of M_tail u = sigma (K + M) u.
[[nodiscard]] TailIndicator tail_indicator(const FemSystem& s, const std::vector<bool>& core_edges,
                                           const SolverSettings& settings = {});

}  // namespace qg
