#include "qg/fem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace qg {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::size_t node_total(const MetricGraph& g, double h)
{
    std::size_t total = g.vertex_count();
    for (const Edge& e : g.edges()) total += static_cast<std::size_t>(std::max(2.0, std::ceil(e.length / h))) - 1;
    return total;
}

FemMesh build_mesh(std::shared_ptr<const MetricGraph> g, ConditionAssignment cond, std::vector<int> segments,
                   double h_target, bool capped)
{
    FemMesh m;
    m.graph = std::move(g);
    m.conditions = std::move(cond);
    m.segments = std::move(segments);
    m.h_target = h_target;
    m.capped = capped;
    m.node_count = m.graph->vertex_count();
    m.edge_offset.resize(m.segments.size());
    for (std::size_t e = 0; e < m.segments.size(); ++e) {
        m.edge_offset[e] = m.node_count;
        m.node_count += static_cast<std::size_t>(m.segments[e] - 1);
    }
    m.free_index.assign(m.node_count, -1);
    for (std::size_t node = 0; node < m.node_count; ++node) {
        if (node < m.graph->vertex_count() && m.conditions.is_dirichlet(node)) continue;
        m.free_index[node] = static_cast<std::ptrdiff_t>(m.free_count++);
    }
    return m;
}

/// One indicator per connected component that carries no Dirichlet node,
/// normalized in the mass inner product.
Eigen::MatrixXd zero_modes(const FemMesh& m, const SparseMatrix& M)
{
    const MetricGraph& g = *m.graph;
    const auto labels = g.component_labels();
    const std::size_t nc = g.component_count();
    std::vector<bool> clamped(nc, false);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (m.conditions.is_dirichlet(v)) clamped[labels[v]] = true;

    std::vector<std::size_t> node_label(m.node_count);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) node_label[v] = labels[v];
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
        for (int j = 1; j < m.segments[e]; ++j) node_label[m.node(e, j)] = labels[g.edge(e).from];

    std::vector<std::size_t> free_components;
    for (std::size_t c = 0; c < nc; ++c)
        if (!clamped[c]) free_components.push_back(c);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.free_count),
                                              static_cast<Eigen::Index>(free_components.size()));
    for (std::size_t j = 0; j < free_components.size(); ++j) {
        for (std::size_t node = 0; node < m.node_count; ++node)
            if (m.free_index[node] >= 0 && node_label[node] == free_components[j])
                Z(m.free_index[node], static_cast<Eigen::Index>(j)) = 1.0;
        const double norm = std::sqrt(Z.col(static_cast<Eigen::Index>(j)).dot(M * Z.col(static_cast<Eigen::Index>(j))));
        Z.col(static_cast<Eigen::Index>(j)) /= norm;
    }
    return Z;
}

/// ||r||_* = sqrt(r^T (K + M)^{-1} r), the discrete dual of the H^1 norm.
double dual_norm(const Eigen::VectorXd& r, const PencilSolve& solve)
{
    return std::sqrt(std::max(0.0, r.dot(solve(r))));
}

double relative_residual(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& u, double lambda,
                         const PencilSolve& solve)
{
    const Eigen::VectorXd Ku = K * u;
    const double scale = dual_norm(Ku, solve);
    if (scale == 0.0) return 0.0;
    return dual_norm(Ku - lambda * (M * u), solve) / scale;
}

void check_residuals(const Spectrum& s, double limit)
{
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s.residuals[i] <= limit)) {
            std::ostringstream msg;
            msg << "eigenpair " << i + 1 << " misses the residual limit: " << std::scientific << std::setprecision(3)
                << s.residuals[i] << " > " << limit;
            throw SolverError(msg.str());
        }
}

}  // namespace

std::size_t FemMesh::node(EdgeIndex e, int j) const
{
    const Edge& ed = graph->edge(e);
    if (j == 0) return ed.from;
    if (j == segments.at(e)) return ed.to;
    return edge_offset.at(e) + static_cast<std::size_t>(j - 1);
}

double FemMesh::width(EdgeIndex e) const
{
    return graph->edge(e).length / segments.at(e);
}

double FemMesh::max_width() const
{
    double w = 0.0;
    for (EdgeIndex e = 0; e < segments.size(); ++e) w = std::max(w, width(e));
    return w;
}

FemMesh mesh(const QuantumGraph& q, double h_target, std::size_t dof_cap)
{
    if (!(h_target > 0.0) || !std::isfinite(h_target)) throw InputError("mesh width must be positive");
    const MetricGraph& g = q.graph;
    if (dof_cap < g.vertex_count() + g.edge_count())
        throw InputError("DOF cap " + std::to_string(dof_cap) + " cannot hold two subintervals per edge");

    double h = h_target;
    bool capped = false;
    if (node_total(g, h) > dof_cap) {
        capped = true;
        double lo = h, hi = h;
        for (const Edge& e : g.edges()) hi = std::max(hi, e.length);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (node_total(g, mid) > dof_cap ? lo : hi) = mid;
        }
        h = hi;
    }
    std::vector<int> segments;
    for (const Edge& e : g.edges()) segments.push_back(static_cast<int>(std::max(2.0, std::ceil(e.length / h))));
    return build_mesh(std::make_shared<const MetricGraph>(g), q.conditions, std::move(segments), h_target, capped);
}

FemMesh bisect(const FemMesh& m)
{
    std::vector<int> segments = m.segments;
    for (int& s : segments) s *= 2;
    return build_mesh(m.graph, m.conditions, std::move(segments), 0.5 * m.h_target, m.capped);
}

FemSystem assemble(const FemMesh& m)
{
    Triplets tk, tm;
    const MetricGraph& g = *m.graph;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const double w = m.width(e);
        for (int j = 0; j < m.segments[e]; ++j) {
            const std::ptrdiff_t a = m.free_index[m.node(e, j)];
            const std::ptrdiff_t b = m.free_index[m.node(e, j + 1)];
            auto add = [&](std::ptrdiff_t r, std::ptrdiff_t c, double k, double mass) {
                if (r < 0 || c < 0) return;
                tk.emplace_back(r, c, k);
                tm.emplace_back(r, c, mass);
            };
            add(a, a, 1.0 / w, w / 3.0);
            add(b, b, 1.0 / w, w / 3.0);
            add(a, b, -1.0 / w, w / 6.0);
            add(b, a, -1.0 / w, w / 6.0);
        }
    }
    const auto n = static_cast<Eigen::Index>(m.free_count);
    FemSystem s{m, SparseMatrix(n, n), SparseMatrix(n, n)};
    s.K.setFromTriplets(tk.begin(), tk.end());
    s.M.setFromTriplets(tm.begin(), tm.end());
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(s.M.coeff(i, i) > 0.0)) throw SolverError("mass matrix is not positive definite (isolated node)");
    return s;
}

SparseMatrix partial_mass(const FemMesh& m, const std::vector<bool>& in_tail)
{
    Triplets tm;
    for (EdgeIndex e = 0; e < m.segments.size(); ++e) {
        if (!in_tail.at(e)) continue;
        const double w = m.width(e);
        for (int j = 0; j < m.segments[e]; ++j) {
            const std::ptrdiff_t a = m.free_index[m.node(e, j)];
            const std::ptrdiff_t b = m.free_index[m.node(e, j + 1)];
            if (a >= 0) tm.emplace_back(a, a, w / 3.0);
            if (b >= 0) tm.emplace_back(b, b, w / 3.0);
            if (a >= 0 && b >= 0) {
                tm.emplace_back(a, b, w / 6.0);
                tm.emplace_back(b, a, w / 6.0);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(m.free_count);
    SparseMatrix out(n, n);
    out.setFromTriplets(tm.begin(), tm.end());
    return out;
}

Spectrum solve_eigs(const FemSystem& s, std::size_t count, const SolverSettings& settings)
{
    if (count > s.mesh.free_count) throw InputError("more eigenvalues requested than free DOFs");
    Spectrum out;
    out.method = SpectrumMethod::fem;
    out.mesh_h = s.mesh.max_width();
    if (count == 0) return out;

    const auto n = static_cast<Eigen::Index>(s.mesh.free_count);
    const Eigen::MatrixXd Z = zero_modes(s.mesh, s.M);
    const auto nz = std::min<Eigen::Index>(Z.cols(), static_cast<Eigen::Index>(count));
    const auto k = static_cast<Eigen::Index>(count);

    out.eigenvectors.resize(n, k);
    out.eigenvalues.assign(count, 0.0);
    out.residuals.assign(count, 0.0);
    out.eigenvectors.leftCols(nz) = Z.leftCols(nz);

    if (k > nz) {
        const SparseMatrix A = s.K + s.M;
        Eigen::SimplicialLDLT<SparseMatrix> factor(A);
        if (factor.info() != Eigen::Success) throw SolverError("sparse factorization of K + M failed");
        const PencilSolve solve = [&factor](const Eigen::VectorXd& r) -> Eigen::VectorXd { return factor.solve(r); };
        Eigen::MatrixXd vecs;
        if (static_cast<std::size_t>(n) <= settings.dense_threshold) {
            const Eigen::MatrixXd Kd(s.K), Md(s.M);
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Kd, Md);
            if (dense.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
            vecs = dense.eigenvectors().middleCols(Z.cols(), k - nz);
            // Re-orthogonalize against the exact zero modes the dense solver
            // only resolves to rounding.
            if (Z.cols() > 0) vecs -= Z * (Z.transpose() * (s.M * vecs));
        } else {
            PencilSettings ps = settings.pencil;
            auto measure = [](const Eigen::VectorXd& Au, const Eigen::VectorXd& Bu, double theta,
                              const PencilSolve& inv) {
                const double scale = dual_norm(Au - Bu, inv);
                return scale > 0.0 ? dual_norm(Au - Bu / theta, inv) / scale : 0.0;
            };
            const PencilResult r = largest_pencil_eigs(A, s.M, static_cast<std::size_t>(k - nz), Z, ps, measure);
            vecs = r.vectors;
        }
        for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
            Eigen::VectorXd u = vecs.col(j);
            u /= std::sqrt(u.dot(s.M * u));
            const double lambda = u.dot(s.K * u);
            out.eigenvalues[static_cast<std::size_t>(nz + j)] = lambda;
            out.residuals[static_cast<std::size_t>(nz + j)] = relative_residual(s.K, s.M, u, lambda, solve);
            out.eigenvectors.col(nz + j) = u;
        }
    }
    out.regroup();
    check_residuals(out, settings.residual_limit);
    return out;
}

Spectrum richardson(const Spectrum& coarse, const Spectrum& fine)
{
    if (coarse.size() != fine.size()) throw InputError("extrapolation needs spectra of equal length");
    Spectrum out = fine;
    out.method = SpectrumMethod::fem_extrapolated;
    std::vector<std::size_t> order(fine.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> values(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) values[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.eigenvalues[i] = values[order[i]];
        out.residuals[i] = fine.residuals[order[i]];
        if (fine.eigenvectors.cols() == static_cast<Eigen::Index>(fine.size()))
            out.eigenvectors.col(static_cast<Eigen::Index>(i)) = fine.eigenvectors.col(static_cast<Eigen::Index>(order[i]));
    }
    out.regroup();
    out.flagged = coarse.flagged || fine.flagged || cluster(coarse.eigenvalues) != cluster(fine.eigenvalues);
    return out;
}

Spectrum solve_fem(const QuantumGraph& q, std::size_t count, double h, std::size_t dof_cap, const SolverSettings& settings)
{
    return solve_eigs(assemble(mesh(q, h, dof_cap)), count, settings);
}

Spectrum solve_extrapolated(const QuantumGraph& q, std::size_t count, double h, std::size_t dof_cap,
                            const SolverSettings& settings)
{
    const FemMesh coarse = mesh(q, h, dof_cap);
    const Spectrum a = solve_eigs(assemble(coarse), count, settings);
    const Spectrum b = solve_eigs(assemble(bisect(coarse)), count, settings);
    return richardson(a, b);
}

double rayleigh(const FemSystem& s, const Eigen::VectorXd& u)
{
    const double mass = u.dot(s.M * u);
    if (!(mass > 0.0)) throw InputError("Rayleigh quotient of the zero function");
    return u.dot(s.K * u) / mass;
}

Eigen::VectorXd interpolate(const FemMesh& m, const std::function<double(EdgeIndex, double)>& f)
{
    const MetricGraph& g = *m.graph;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.free_count));
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (m.free_index[v] < 0 || g.incident(v).empty()) continue;
        const EdgeEnd end = g.incident(v).front();
        u(m.free_index[v]) = f(end.edge, end.at_start ? 0.0 : g.edge(end.edge).length);
    }
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
        for (int j = 1; j < m.segments[e]; ++j) u(m.free_index[m.node(e, j)]) = f(e, j * m.width(e));
    return u;
}

PLFunction to_pl_function(const FemMesh& m, const Eigen::VectorXd& u)
{
    std::vector<PLFunction::EdgeProfile> profiles(m.segments.size());
    for (EdgeIndex e = 0; e < m.segments.size(); ++e) {
        auto& p = profiles[e];
        const int n = m.segments[e];
        p.x.resize(static_cast<std::size_t>(n) + 1);
        p.y.resize(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j) {
            p.x[j] = j == n ? m.graph->edge(e).length : j * m.width(e);
            const std::ptrdiff_t dof = m.free_index[m.node(e, j)];
            p.y[j] = dof < 0 ? 0.0 : u(dof);
        }
    }
    return PLFunction(m.graph, std::move(profiles));
}

TailIndicator tail_indicator(const FemSystem& s, const std::vector<bool>& core_edges, const SolverSettings& settings)
{
    if (core_edges.size() != s.mesh.segments.size()) throw InputError("core edge mask has the wrong size");
    TailIndicator out;
    out.capped = s.mesh.capped;
    std::vector<bool> tail(core_edges.size());
    for (std::size_t e = 0; e < tail.size(); ++e) tail[e] = !core_edges[e];
    if (std::none_of(tail.begin(), tail.end(), [](bool b) { return b; })) {
        out.trivial = true;
        return out;
    }
    const SparseMatrix A = s.K + s.M;
    const SparseMatrix B = partial_mass(s.mesh, tail);
    if (s.mesh.free_count <= settings.dense_threshold) {
        const Eigen::MatrixXd Bd(B), Ad(A);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Bd, Ad, Eigen::EigenvaluesOnly);
        out.sigma = dense.eigenvalues().maxCoeff();
        return out;
    }
    PencilSettings ps = settings.pencil;
    // sigma is only compared across cores; the Ritz value is accurate to the
    // square of this residual.
    ps.tol = std::max(ps.tol, 1e-8);
    ps.floor_accept = std::max(ps.floor_accept, 1e-6);
    const PencilResult r = largest_pencil_eigs(A, B, 1, Eigen::MatrixXd(), ps);
    out.sigma = r.theta(0);
    return out;
}

}  // namespace qg
