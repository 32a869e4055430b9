#include "qg/secular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qg/geometry.hpp"

namespace qg {

namespace {

Eigen::VectorXd singular_values(const QuantumGraph& q, double k)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(secular_matrix(q, k));
    return svd.singularValues();  // descending
}

double golden_min(const QuantumGraph& q, double a, double b, double tol)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = secular_sigma_min(q, c), fd = secular_sigma_min(q, d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = secular_sigma_min(q, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = secular_sigma_min(q, d);
        }
    }
    return 0.5 * (a + b);
}

double bisect_sign(const QuantumGraph& q, double a, double b, double fa, double tol)
{
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = secular_determinant(q, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double secular_determinant(const QuantumGraph& q, double k)
{
    return secular_matrix(q, k).partialPivLu().determinant();
}

Eigen::MatrixXd secular_matrix(const QuantumGraph& q, double k)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("secular matrix needs k > 0");
    const MetricGraph& g = q.graph;
    const auto n = static_cast<Eigen::Index>(2 * g.edge_count());
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);

    // Value and outgoing derivative / k of f_e at one of its ends, as rows
    // over (a_e, b_e).
    auto value = [&](const EdgeEnd& end) -> Eigen::RowVector2d {
        if (end.at_start) return {1.0, 0.0};
        const double kl = k * g.edge(end.edge).length;
        return {std::cos(kl), std::sin(kl)};
    };
    auto flux = [&](const EdgeEnd& end) -> Eigen::RowVector2d {
        if (end.at_start) return {0.0, 1.0};
        const double kl = k * g.edge(end.edge).length;
        return {std::sin(kl), -std::cos(kl)};
    };

    Eigen::Index row = 0;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        const auto& inc = g.incident(v);
        if (inc.empty()) continue;
        auto cols = [](const EdgeEnd& end) { return static_cast<Eigen::Index>(2 * end.edge); };
        if (q.conditions.is_dirichlet(v)) {
            for (const EdgeEnd& end : inc) {
                S.block<1, 2>(row, cols(end)) += value(end);
                ++row;
            }
            continue;
        }
        for (std::size_t i = 1; i < inc.size(); ++i) {
            S.block<1, 2>(row, cols(inc[i])) += value(inc[i]);
            S.block<1, 2>(row, cols(inc[0])) -= value(inc[0]);
            ++row;
        }
        for (const EdgeEnd& end : inc) S.block<1, 2>(row, cols(end)) += flux(end);
        ++row;
    }
    return S;
}

double secular_sigma_min(const QuantumGraph& q, double k)
{
    const Eigen::VectorXd s = singular_values(q, k);
    return s.size() ? s(s.size() - 1) : 0.0;
}

Spectrum eigs_by_scan(const QuantumGraph& q, const SecularSettings& settings)
{
    const MetricGraph& g = q.graph;
    if (g.edge_count() == 0) throw InputError("secular scan needs at least one edge");
    if (g.edge_count() > settings.max_edges) throw InputError("secular oracle is limited to small graphs");
    if (settings.k_upper <= 0.0 && settings.count == 0) throw InputError("secular scan needs k_upper or a count");

    const double L = total_length(g);
    const auto ne = static_cast<double>(g.edge_count());
    const auto nv = static_cast<double>(g.vertex_count());
    double k_upper = settings.k_upper;
    if (k_upper <= 0.0) k_upper = std::numbers::pi * (static_cast<double>(settings.count) + ne + 1.0) / L;
    const double step = settings.step > 0.0 ? settings.step : std::numbers::pi / (20.0 * L);

    // Zero eigenvalue: one per component without Dirichlet vertices.
    std::size_t zero_count = 0;
    {
        const auto labels = g.component_labels();
        std::vector<bool> clamped(g.component_count(), false);
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            if (q.conditions.is_dirichlet(v)) clamped[labels[v]] = true;
        zero_count = static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), false));
    }

    const auto points = static_cast<std::size_t>(std::ceil(k_upper / step)) + 2;
    std::vector<double> ks(points), sig(points), det(points);
    for (std::size_t i = 0; i < points; ++i) {
        ks[i] = step * static_cast<double>(i + 1);
        sig[i] = secular_sigma_min(q, ks[i]);
        det[i] = secular_determinant(q, ks[i]);
    }

    // Candidates come from two detectors: valleys of sigma_min (which also
    // see even-multiplicity roots) and sign changes of the determinant
    // (which separate close simple roots sharing one valley).
    std::vector<double> candidates;
    for (std::size_t i = 1; i + 1 < points; ++i)
        if (sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1])
            candidates.push_back(golden_min(q, ks[i - 1], ks[i + 1], settings.root_tol));
    for (std::size_t i = 0; i + 1 < points; ++i)
        if ((det[i] < 0.0) != (det[i + 1] < 0.0))
            candidates.push_back(bisect_sign(q, ks[i], ks[i + 1], det[i], settings.root_tol));
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::pair<double, int>> roots;  // k, multiplicity
    for (double k : candidates) {
        const Eigen::VectorXd s = singular_values(q, k);
        if (!(s(s.size() - 1) < settings.null_tol)) continue;
        if (!roots.empty() && std::abs(roots.back().first - k) < 1e-9) continue;
        const int mult = static_cast<int>((s.array() < settings.null_tol).count());
        roots.emplace_back(k, mult);
    }

    Spectrum out;
    out.method = SpectrumMethod::secular;
    out.mesh_h = 0.0;
    for (std::size_t i = 0; i < zero_count; ++i) {
        out.eigenvalues.push_back(0.0);
        out.residuals.push_back(0.0);
    }
    const double k_scanned = ks[points - 2];
    std::size_t below = zero_count;
    for (const auto& [k, mult] : roots) {
        if (k > k_scanned) continue;
        below += static_cast<std::size_t>(mult);
        for (int j = 0; j < mult; ++j) {
            out.eigenvalues.push_back(k * k);
            out.residuals.push_back(secular_sigma_min(q, k));
        }
    }

    const double excess = static_cast<double>(below) - L * k_scanned / std::numbers::pi;
    if (excess < -ne - 1.0 || excess > nv + 1.0)
        throw SolverError("secular scan count " + std::to_string(below) + " leaves the Weyl bracket: missed root suspected");
    if (settings.count > 0) {
        if (out.eigenvalues.size() < settings.count)
            throw SolverError("secular scan found fewer eigenvalues than requested");
        out.eigenvalues.resize(settings.count);
        out.residuals.resize(settings.count);
    }
    out.regroup();
    return out;
}

}  // namespace qg
