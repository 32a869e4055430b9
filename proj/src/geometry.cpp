#include "qg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

namespace qg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VertexIndex far_end(const MetricGraph& g, const EdgeEnd& end)
{
    const Edge& e = g.edge(end.edge);
    return end.at_start ? e.to : e.from;
}

/// max over t in [0, len] of min(a + t, b + len - t).
double edge_peak(double a, double b, double len)
{
    if (b + len <= a) return b + len;
    if (a + len <= b) return a + len;
    return 0.5 * (a + b + len);
}

/// Eccentricity of the point at `s` on edge `e`, given its distances to all
/// vertices.
double point_eccentricity(const MetricGraph& g, EdgeIndex e, double s, const std::vector<double>& d)
{
    double ecc = 0.0;
    for (EdgeIndex f = 0; f < g.edge_count(); ++f) {
        const Edge& ef = g.edge(f);
        if (f == e) {
            // Points on the same edge: beyond p towards `to`, and towards `from`.
            ecc = std::max(ecc, 0.5 * (d[ef.to] + ef.length - s));
            ecc = std::max(ecc, 0.5 * (d[ef.from] + s));
        } else {
            ecc = std::max(ecc, edge_peak(d[ef.from], d[ef.to], ef.length));
        }
    }
    return ecc;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double total_length(const MetricGraph& g)
{
    double sum = 0.0;
    for (const Edge& e : g.edges()) sum += e.length;
    return sum;
}

int betti_number(const MetricGraph& g)
{
    g.require_connected();
    return static_cast<int>(g.edge_count()) - static_cast<int>(g.vertex_count()) + 1;
}

std::vector<double> vertex_distances(const MetricGraph& g, std::vector<double> dist)
{
    using Item = std::pair<double, VertexIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (dist[v] < kInf) heap.emplace(dist[v], v);
    while (!heap.empty()) {
        auto [dv, v] = heap.top();
        heap.pop();
        if (dv > dist[v]) continue;
        for (const EdgeEnd& end : g.incident(v)) {
            const VertexIndex w = far_end(g, end);
            const double cand = dv + g.edge(end.edge).length;
            if (cand < dist[w]) {
                dist[w] = cand;
                heap.emplace(cand, w);
            }
        }
    }
    return dist;
}

std::vector<double> vertex_distances(const MetricGraph& g, VertexIndex source)
{
    std::vector<double> init(g.vertex_count(), kInf);
    init.at(source) = 0.0;
    return vertex_distances(g, std::move(init));
}

Eigen::MatrixXd vertex_distance_matrix(const MetricGraph& g)
{
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
        auto d = vertex_distances(g, static_cast<VertexIndex>(v));
        out.col(v) = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
    }
    return out;
}

std::vector<double> distances_from_point(const MetricGraph& g, const GraphPoint& p)
{
    const Edge& e = g.edge(p.edge);
    std::vector<double> init(g.vertex_count(), kInf);
    init[e.from] = std::min(init[e.from], p.offset);
    init[e.to] = std::min(init[e.to], e.length - p.offset);
    return vertex_distances(g, std::move(init));
}

double point_distance(const MetricGraph& g, const GraphPoint& p_in, const GraphPoint& q_in)
{
    // Fixed argument order, so that the result is exactly symmetric.
    const bool swap = std::pair(q_in.edge, q_in.offset) < std::pair(p_in.edge, p_in.offset);
    const GraphPoint& p = swap ? q_in : p_in;
    const GraphPoint& q = swap ? p_in : q_in;
    const auto d = distances_from_point(g, p);
    const Edge& eq = g.edge(q.edge);
    double best = std::min(d[eq.from] + q.offset, d[eq.to] + eq.length - q.offset);
    if (p.edge == q.edge) best = std::min(best, std::abs(p.offset - q.offset));
    return best;
}

DiameterEstimate diameter(const MetricGraph& g, double resolution)
{
    if (!(resolution > 0.0)) throw InputError("diameter resolution must be positive");
    const Eigen::MatrixXd dv = vertex_distance_matrix(g);
    DiameterEstimate out;
    out.error = resolution;
    std::vector<double> d(g.vertex_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        const double pieces = std::max(1.0, std::exp2(std::ceil(std::log2(ed.length / resolution))));
        const auto n = static_cast<long>(pieces);
        for (long j = 0; j <= n; ++j) {
            const double s = ed.length * static_cast<double>(j) / static_cast<double>(n);
            for (VertexIndex w = 0; w < g.vertex_count(); ++w)
                d[w] = std::min(s + dv(static_cast<Eigen::Index>(ed.from), static_cast<Eigen::Index>(w)),
                                ed.length - s + dv(static_cast<Eigen::Index>(ed.to), static_cast<Eigen::Index>(w)));
            out.value = std::max(out.value, point_eccentricity(g, e, s, d));
        }
    }
    return out;
}

double inradius(const MetricGraph& g, const ConditionAssignment& cond)
{
    const auto dirichlet = cond.dirichlet_set();
    if (dirichlet.empty()) throw InputError("inradius needs a nonempty Dirichlet set");
    std::vector<double> init(g.vertex_count(), kInf);
    for (VertexIndex v : dirichlet) init.at(v) = 0.0;
    const auto d = vertex_distances(g, std::move(init));
    double best = 0.0;
    for (const Edge& e : g.edges()) best = std::max(best, edge_peak(d[e.from], d[e.to], e.length));
    return best;
}

double cheeger_sweep(const PLFunction& f)
{
    const auto levels = f.critical_values();
    if (levels.size() < 2) throw InputError("cheeger_sweep: constant function");
    const double total = f.total_length();
    double best = kInf;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        // n(t) is constant on (t_{i-1}, t_i) and |{f < t}| runs through an
        // interval; the ratio is smallest where min(m, L - m) is largest.
        const double mid = 0.5 * (levels[i - 1] + levels[i]);
        const auto count = level_data(f, mid).count;
        if (count == 0) continue;
        const double m_lo = sublevel_measure_closed(f, levels[i - 1]);
        const double m_hi = level_data(f, levels[i]).sublevel_measure;
        const double m = std::clamp(0.5 * total, m_lo, std::max(m_lo, m_hi));
        const double denom = std::min(m, total - m);
        if (denom > 0.0) best = std::min(best, static_cast<double>(count) / denom);
    }
    return best;
}

double cheeger_exact_small(const MetricGraph& g, int max_cut_points, std::size_t budget)
{
    struct Site {
        bool on_edge = true;
        EdgeIndex edge = 0;
        VertexIndex vertex = 0;
        std::vector<EdgeEnd> moved;  // ends re-attached to the new vertex copy
    };
    std::vector<Site> sites;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) sites.push_back({true, e, 0, {}});
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        const auto& inc = g.incident(v);
        if (inc.size() < 2) continue;
        if (inc.size() > 16) throw InputError("cheeger_exact_small: vertex degree too large to enumerate");
        const std::size_t combos = std::size_t{1} << inc.size();
        for (std::size_t mask = 2; mask < combos; mask += 2) {  // first end stays put
            Site s{false, 0, v, {}};
            for (std::size_t i = 0; i < inc.size(); ++i)
                if (mask & (std::size_t{1} << i)) s.moved.push_back(inc[i]);
            sites.push_back(std::move(s));
        }
    }

    const int max_points = std::min<int>(max_cut_points, static_cast<int>(sites.size()));
    {
        double count = 0.0, binom = 1.0;
        for (int j = 1; j <= max_points; ++j) {
            binom *= static_cast<double>(sites.size() - static_cast<std::size_t>(j) + 1) / j;
            count += binom * std::exp2(j);
        }
        if (count > static_cast<double>(budget)) throw InputError("cheeger_exact_small: enumeration budget exceeded");
    }

    const double total = total_length(g);
    const std::size_t nv = g.vertex_count(), ne = g.edge_count();
    double best = kInf;

    std::vector<std::size_t> chosen;
    auto evaluate = [&]() {
        // Nodes: vertices [0, nv), extra vertex copies [nv, nv + k),
        // edge "from" halves [nv + k, nv + k + ne), "to" halves after that.
        const std::size_t k = chosen.size();
        const std::size_t from_base = nv + k, to_base = nv + k + ne;
        UnionFind uf(to_base + ne);
        std::vector<bool> edge_cut(ne, false);
        std::vector<std::ptrdiff_t> vertex_cut(nv, -1);
        for (std::size_t i = 0; i < k; ++i) {
            const Site& s = sites[chosen[i]];
            if (s.on_edge) {
                if (edge_cut[s.edge]) return;
                edge_cut[s.edge] = true;
            } else {
                if (vertex_cut[s.vertex] >= 0) return;
                vertex_cut[s.vertex] = static_cast<std::ptrdiff_t>(i);
            }
        }
        auto vertex_node = [&](const EdgeEnd& end) -> std::size_t {
            const Edge& e = g.edge(end.edge);
            const VertexIndex v = end.at_start ? e.from : e.to;
            if (vertex_cut[v] >= 0) {
                const Site& s = sites[chosen[static_cast<std::size_t>(vertex_cut[v])]];
                if (std::find(s.moved.begin(), s.moved.end(), end) != s.moved.end())
                    return nv + static_cast<std::size_t>(vertex_cut[v]);
            }
            return v;
        };
        for (EdgeIndex e = 0; e < ne; ++e) {
            uf.unite(from_base + e, vertex_node({e, true}));
            if (edge_cut[e]) uf.unite(to_base + e, vertex_node({e, false}));
            else uf.unite(from_base + e, vertex_node({e, false}));
        }
        std::vector<std::size_t> comp_of(to_base + ne);
        std::vector<std::size_t> roots;
        for (std::size_t x = 0; x < to_base + ne; ++x) {
            const std::size_t r = uf.find(x);
            auto it = std::find(roots.begin(), roots.end(), r);
            if (it == roots.end()) {
                roots.push_back(r);
                comp_of[x] = roots.size() - 1;
            } else {
                comp_of[x] = static_cast<std::size_t>(it - roots.begin());
            }
        }
        const std::size_t nc = roots.size();
        if (nc < 2 || nc > 20) return;
        std::vector<double> fixed(nc, 0.0);
        for (EdgeIndex e = 0; e < ne; ++e)
            if (!edge_cut[e]) fixed[comp_of[from_base + e]] += g.edge(e).length;

        for (std::size_t mask = 2; mask < (std::size_t{1} << nc); mask += 2) {
            auto inside = [&](std::size_t node) { return ((mask >> comp_of[node]) & 1U) != 0; };
            int boundary = 0;
            double vmin = 0.0, vmax = 0.0;
            for (std::size_t c = 0; c < nc; ++c)
                if ((mask >> c) & 1U) vmin += fixed[c];
            vmax = vmin;
            for (std::size_t i = 0; i < k; ++i) {
                const Site& s = sites[chosen[i]];
                if (s.on_edge) {
                    const bool a = inside(from_base + s.edge), b = inside(to_base + s.edge);
                    if (a != b) ++boundary;
                    if (a && b) {
                        vmin += g.edge(s.edge).length;
                        vmax += g.edge(s.edge).length;
                    } else if (a || b) {
                        vmax += g.edge(s.edge).length;
                    }
                } else {
                    if (inside(s.vertex) != inside(nv + i)) ++boundary;
                }
            }
            if (boundary == 0) continue;
            const double v1 = std::clamp(0.5 * total, vmin, vmax);
            const double denom = std::min(v1, total - v1);
            if (denom > 0.0) best = std::min(best, boundary / denom);
        }
    };

    std::function<void(std::size_t)> recurse = [&](std::size_t start) {
        if (!chosen.empty()) evaluate();
        if (static_cast<int>(chosen.size()) == max_points) return;
        for (std::size_t i = start; i < sites.size(); ++i) {
            chosen.push_back(i);
            recurse(i + 1);
            chosen.pop_back();
        }
    };
    recurse(0);
    return best;
}

AnnulusVolumes annulus_volumes(const MetricGraph& g, VertexIndex centre, const std::vector<double>& radii)
{
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1])) throw InputError("annulus radii must decrease");
    const auto d = vertex_distances(g, centre);
    AnnulusVolumes out;
    double ecc = 0.0;
    for (const Edge& e : g.edges()) ecc = std::max(ecc, edge_peak(d[e.from], d[e.to], e.length));
    out.clipped = !radii.empty() && radii.front() > ecc;

    auto overlap = [](double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); };
    for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
        const double lo = radii[k + 1], hi = radii[k];
        double vol = 0.0;
        for (const Edge& e : g.edges()) {
            const double a = d[e.from], b = d[e.to], len = e.length;
            const double peak = std::clamp(0.5 * (b + len - a), 0.0, len);
            // Rising branch a + t on [0, peak], falling branch b + len - t on [peak, len].
            vol += overlap(0.0, peak, lo - a, hi - a);
            vol += overlap(peak, len, b + len - hi, b + len - lo);
        }
        out.volumes.push_back(vol);
    }
    return out;
}

std::vector<double> harmonic_radii(int k_max)
{
    std::vector<double> r;
    for (int k = 1; k <= k_max + 1; ++k) r.push_back(1.0 / k);
    return r;
}

GeometryReport geometry_report(const MetricGraph& g, const ConditionAssignment& cond, double resolution)
{
    GeometryReport out;
    out.total_length = total_length(g);
    out.diameter = diameter(g, resolution);
    out.betti = betti_number(g);
    if (cond.has_dirichlet()) out.inradius = inradius(g, cond);
    return out;
}

}  // namespace qg
