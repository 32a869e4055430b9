#include "qg/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "qg/families.hpp"
#include "qg/graph.hpp"

namespace qg {

namespace {

/// A-orthonormal basis stored together with its image under A.
class Basis {
public:
    Basis(const SparseMatrix& A, const Eigen::MatrixXd& deflate, Eigen::Index capacity)
        : A_(A), Z_(deflate), AZ_(A * deflate), V_(A.rows(), capacity), AV_(A.rows(), capacity)
    {
    }

    [[nodiscard]] Eigen::Index size() const { return cols_; }
    [[nodiscard]] Eigen::Index capacity() const { return V_.cols(); }
    [[nodiscard]] auto V() const { return V_.leftCols(cols_); }
    [[nodiscard]] auto AV() const { return AV_.leftCols(cols_); }

    /// Orthogonalizes and appends the columns of Y; returns how many survived.
    Eigen::Index append(const Eigen::MatrixXd& Y)
    {
        Eigen::Index added = 0;
        for (Eigen::Index j = 0; j < Y.cols() && cols_ < capacity(); ++j) {
            Eigen::VectorXd y = Y.col(j);
            Eigen::VectorXd Ay = A_ * y;
            const double before = std::sqrt(std::max(0.0, y.dot(Ay)));
            if (!(before > 0.0)) continue;
            // Repeat Gram-Schmidt while a pass removes most of the vector, so
            // directions left after heavy cancellation stay A-orthogonal.
            double norm = before;
            for (int pass = 0; pass < 4; ++pass) {
                if (Z_.cols() > 0) y -= Z_ * (AZ_.transpose() * y);
                if (cols_ > 0) y -= V() * (AV().transpose() * y);
                Ay = A_ * y;
                const double now = std::sqrt(std::max(0.0, y.dot(Ay)));
                const bool settled = now > 0.7 * norm;
                norm = now;
                if (settled) break;
            }
            if (!(norm > 1e-10 * before)) continue;
            V_.col(cols_) = y / norm;
            AV_.col(cols_) = Ay / norm;
            ++cols_;
            ++added;
        }
        return added;
    }

    /// Restarts from V; A V is recomputed so rounding does not accumulate.
    void reset(const Eigen::MatrixXd& V)
    {
        cols_ = V.cols();
        V_.leftCols(cols_) = V;
        AV_.leftCols(cols_) = A_ * V;
    }

private:
    const SparseMatrix& A_;
    Eigen::MatrixXd Z_, AZ_;
    Eigen::MatrixXd V_, AV_;
    Eigen::Index cols_ = 0;
};

}  // namespace

PencilResult largest_pencil_eigs(const SparseMatrix& A, const SparseMatrix& B, std::size_t count,
                                 const Eigen::MatrixXd& deflate, const PencilSettings& settings,
                                 const PencilResidual& residual)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n) throw InputError("pencil matrices must be square and equal-sized");
    if (deflate.cols() > 0 && deflate.rows() != n) throw InputError("deflation block has the wrong row count");
    const auto avail = static_cast<std::size_t>(n - deflate.cols());
    if (count > avail) throw InputError("more eigenpairs requested than degrees of freedom");

    PencilResult out;
    if (count == 0) return out;

    Eigen::SimplicialLDLT<SparseMatrix> factor(A);
    if (factor.info() != Eigen::Success) throw SolverError("sparse factorization of the shifted stiffness failed");
    if ((factor.vectorD().array() <= 0.0).any()) throw SolverError("shifted stiffness is not positive definite");

    const std::size_t block = std::min(avail, settings.block ? settings.block : count + 3);
    const std::size_t basis = std::min(avail, std::max(settings.basis ? settings.basis : std::max<std::size_t>(6 * block, 48), block));

    // Default: ||B u - theta A u||_* / ||B u||_* in the A^{-1} norm, which
    // stays clear of the rounding floor of badly graded meshes.
    PencilResidual measure = residual ? residual
                                      : [](const Eigen::VectorXd& Au, const Eigen::VectorXd& Bu, double theta,
                                           const PencilSolve& inv) {
                                            const Eigen::VectorXd r = Bu - theta * Au;
                                            const double scale = std::sqrt(std::max(0.0, Bu.dot(inv(Bu))));
                                            return std::sqrt(std::max(0.0, r.dot(inv(r)))) / std::max(scale, 1e-300);
                                        };
    const PencilSolve solve = [&factor](const Eigen::VectorXd& r) -> Eigen::VectorXd { return factor.solve(r); };

    Basis V(A, deflate, static_cast<Eigen::Index>(basis));
    SeededRng rng(settings.seed);
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(block));
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
    V.append(X);

    const auto k = static_cast<Eigen::Index>(count);
    Eigen::Index block_start = 0;
    double previous_worst = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= settings.max_restarts; ++restart) {
        while (V.size() < V.capacity()) {
            const Eigen::Index width = V.size() - block_start;
            if (width <= 0) break;
            Eigen::MatrixXd rhs = B * V.V().middleCols(block_start, width);
            Eigen::MatrixXd Y(n, width);
            for (Eigen::Index j = 0; j < width; ++j) Y.col(j) = factor.solve(rhs.col(j));
            block_start = V.size();
            if (V.append(Y) == 0) break;
        }
        if (V.size() < k) {
            // The start block spanned an invariant subspace that is too small;
            // top it up with fresh random directions.
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
            block_start = V.size();
            V.append(X);
            continue;
        }

        const Eigen::MatrixXd BV = B * V.V();
        Eigen::MatrixXd H = V.V().transpose() * BV;
        H = 0.5 * (H + H.transpose()).eval();
        // The basis is A-orthonormal only up to rounding, so project both
        // sides instead of taking V^T A V = I.
        Eigen::MatrixXd G = V.V().transpose() * V.AV();
        G = 0.5 * (G + G.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H, G);
        if (ritz.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz projection failed");
        const Eigen::Index m = H.rows();
        Eigen::MatrixXd Yr = ritz.eigenvectors().rowwise().reverse();
        Eigen::VectorXd theta = ritz.eigenvalues().reverse();

        Eigen::VectorXd res(k);
        bool converged = true;
        for (Eigen::Index i = 0; i < k; ++i) {
            // A u from a fresh product: the cached A V drifts across restarts
            // and would understate the residual.
            const Eigen::VectorXd Au = A * (V.V() * Yr.col(i));
            const Eigen::VectorXd Bu = BV * Yr.col(i);
            res(i) = measure(Au, Bu, theta(i), solve);
            if (!(res(i) <= settings.tol)) converged = false;
        }
        // Residuals that stop improving have hit the rounding floor of the
        // factorization; accept them when they are below the floor limit.
        const double worst = res.maxCoeff();
        const bool stalled = worst > 0.5 * previous_worst && worst <= settings.floor_accept;
        previous_worst = std::min(previous_worst, worst);
        if (converged || stalled) {
            out.theta = theta.head(k);
            out.vectors = V.V() * Yr.leftCols(k);
            out.residuals = res;
            out.restarts = restart;
            return out;
        }

        const Eigen::Index keep = std::min<Eigen::Index>(m, static_cast<Eigen::Index>(block));
        if (keep >= V.capacity()) {
            // Basis cannot grow beyond the kept block: the projection is exact.
            out.theta = theta.head(k);
            out.vectors = V.V() * Yr.leftCols(k);
            out.residuals = res;
            out.restarts = restart;
            return out;
        }
        V.reset(V.V() * Yr.leftCols(keep));
        block_start = 0;
    }
    throw SolverError("block Krylov iteration did not converge within the restart budget");
}

}  // namespace qg
