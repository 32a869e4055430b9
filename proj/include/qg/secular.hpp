#pragma once

#include <Eigen/Dense>

#include "qg/graph.hpp"
#include "qg/spectrum.hpp"

namespace qg {

/// Matching matrix in the unknowns (a_e, b_e) of f_e(x) = a_e cos(kx) + b_e sin(kx),
/// ordered a_0, b_0, a_1, b_1, ... Each standard vertex of degree d gives
/// d - 1 continuity rows and one Kirchhoff row (derivatives divided by k);
/// each Dirichlet vertex gives d rows of vanishing values. Its null space
/// is the eigenspace of lambda = k^2. Throws InputError for k <= 0.
[[nodiscard]] Eigen::MatrixXd secular_matrix(const QuantumGraph& q, double k);

/// Determinant of the matching matrix; real-analytic in k.
[[nodiscard]] double secular_determinant(const QuantumGraph& q, double k);

/// Smallest singular value of the matching matrix.
[[nodiscard]] double secular_sigma_min(const QuantumGraph& q, double k);

struct SecularSettings {
    double k_upper = 0.0;         ///< scan bound in k; 0 = grow until `count` eigenvalues are found
    std::size_t count = 0;        ///< eigenvalues wanted (with multiplicity); 0 = all up to k_upper
    double step = 0.0;            ///< scan step in k; 0 = pi / (20 L)
    double root_tol = 1e-12;      ///< bracket width at which refinement stops
    double null_tol = 1e-8;       ///< singular values below this count towards multiplicity
    std::size_t max_edges = 64;
};

/// Eigenvalues k^2 located on a k grid: valleys of the smallest singular
/// value refined by golden-section search, and determinant sign changes
/// refined by bisection. A candidate counts when its smallest singular value
/// is below `null_tol`; the multiplicity is the number of such values.
/// lambda = 0 is prepended (multiplicity one per component) when no vertex
/// is Dirichlet. A count that strays from the Weyl bracket
/// -|E| - 1 <= N(k) - L k / pi <= |V| + 1 signals a missed root and raises
/// SolverError.
[[nodiscard]] Spectrum eigs_by_scan(const QuantumGraph& q, const SecularSettings& settings);

}  // namespace qg
