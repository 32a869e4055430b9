#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qg {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct PencilSettings {
    std::size_t block = 0;   ///< 0: count + 3
    std::size_t basis = 0;   ///< 0: max(6 * block, 48), capped by the problem size
    int max_restarts = 400;
    double tol = 1e-11;
    double floor_accept = 1e-9;   ///< accepted once residuals stop improving
    std::uint64_t seed = 1;
};

/// Applies A^{-1} with the factorization held by the solver.
using PencilSolve = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Convergence measure for a Ritz pair, given A u, B u, theta and A^{-1}.
using PencilResidual = std::function<double(const Eigen::VectorXd& Au, const Eigen::VectorXd& Bu, double theta,
                                            const PencilSolve& solve)>;

struct PencilResult {
    Eigen::VectorXd theta;     ///< descending
    Eigen::MatrixXd vectors;   ///< A-orthonormal columns
    Eigen::VectorXd residuals; ///< per pair, as measured by the residual functor
    int restarts = 0;
};

/// Largest `count` eigenpairs of B u = theta A u with A symmetric positive
/// definite and B symmetric positive semidefinite.
///
/// Restarted block Krylov iteration on A^{-1} B in the A inner product with a
/// sparse LDL^T factorization of A. The start block is drawn from a seeded
/// generator, so results are reproducible. Columns of `deflate` must be
/// A-orthonormal eigenvectors of the pencil; the iteration runs in their
/// A-orthogonal complement.
///
/// Throws SolverError when A cannot be factored or the iteration does not
/// converge within the restart budget.
[[nodiscard]] PencilResult largest_pencil_eigs(const SparseMatrix& A, const SparseMatrix& B, std::size_t count,
                                               const Eigen::MatrixXd& deflate, const PencilSettings& settings,
                                               const PencilResidual& residual = {});

}  // namespace qg
