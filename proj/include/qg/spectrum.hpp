#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qg {

enum class SpectrumMethod { fem, fem_extrapolated, secular };

[[nodiscard]] std::string to_string(SpectrumMethod m);

/// Relative gap below which neighbouring eigenvalues share a group.
inline constexpr double kClusterTolerance = 1e-6;

/// Ordered eigenvalues with multiplicity groups. Eigenvectors (when present)
/// are M-orthonormal columns over the free degrees of freedom of the mesh
/// the spectrum was computed on.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<int> groups;  ///< group index per eigenvalue, starting at 0
    std::vector<double> residuals;
    Eigen::MatrixXd eigenvectors;
    SpectrumMethod method = SpectrumMethod::fem;
    double mesh_h = 0.0;  ///< 0 for the secular oracle
    bool flagged = false; ///< e.g. mismatched multiplicities under extrapolation

    [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return eigenvalues.at(i); }
    /// Multiplicity of the group that eigenvalue `i` belongs to.
    [[nodiscard]] int multiplicity(std::size_t i) const;
    /// Recomputes `groups` from the current eigenvalues.
    void regroup(double rel_tol = kClusterTolerance);
};

/// Group index per entry of a sorted sequence: neighbours closer than
/// `rel_tol` relative (absolute near zero) share a group.
[[nodiscard]] std::vector<int> cluster(const std::vector<double>& sorted, double rel_tol = kClusterTolerance);

}  // namespace qg
