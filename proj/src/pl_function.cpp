#include "qg/pl_function.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace qg {

PLFunction::PLFunction(std::shared_ptr<const MetricGraph> graph, std::vector<EdgeProfile> profiles)
    : graph_(std::move(graph)), profiles_(std::move(profiles))
{
    const MetricGraph& g = *graph_;
    if (profiles_.size() != g.edge_count()) throw InputError("PLFunction: one profile per edge required");
    min_ = std::numeric_limits<double>::infinity();
    max_ = -std::numeric_limits<double>::infinity();
    std::vector<double> vertex_value(g.vertex_count(), std::numeric_limits<double>::quiet_NaN());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& p = profiles_[e];
        if (p.x.size() < 2 || p.x.size() != p.y.size()) throw InputError("PLFunction: malformed edge profile");
        const double len = g.edge(e).length;
        if (std::abs(p.x.front()) > 1e-12 * len || std::abs(p.x.back() - len) > 1e-12 * len)
            throw InputError("PLFunction: profile must span the edge");
        for (std::size_t i = 1; i < p.x.size(); ++i)
            if (!(p.x[i] > p.x[i - 1])) throw InputError("PLFunction: breakpoints must increase");
        for (double y : p.y) {
            min_ = std::min(min_, y);
            max_ = std::max(max_, y);
        }
        const std::array<std::pair<VertexIndex, double>, 2> ends{{{g.edge(e).from, p.y.front()}, {g.edge(e).to, p.y.back()}}};
        for (auto [v, y] : ends) {
            if (std::isnan(vertex_value[v])) {
                vertex_value[v] = y;
            } else if (std::abs(vertex_value[v] - y) > 1e-12 * std::max(1.0, std::abs(y))) {
                throw InputError("PLFunction: discontinuous at vertex '" + g.vertex_id(v) + "'");
            }
        }
    }
}

PLFunction PLFunction::sample(std::shared_ptr<const MetricGraph> graph, const std::function<double(EdgeIndex, double)>& f,
                              int segments)
{
    std::vector<EdgeProfile> profiles;
    for (EdgeIndex e = 0; e < graph->edge_count(); ++e) {
        const double len = graph->edge(e).length;
        EdgeProfile p;
        for (int i = 0; i <= segments; ++i) {
            const double x = (i == segments) ? len : len * i / segments;
            p.x.push_back(x);
            p.y.push_back(f(e, x));
        }
        profiles.push_back(std::move(p));
    }
    return PLFunction(std::move(graph), std::move(profiles));
}

PLFunction PLFunction::on_interval(std::vector<double> x, std::vector<double> y)
{
    if (x.empty()) throw InputError("PLFunction: empty interval profile");
    const double len = x.back() - x.front();
    const double shift = x.front();
    for (double& xi : x) xi -= shift;
    x.back() = len;
    auto g = std::make_shared<const MetricGraph>(std::vector<std::string>{"a", "b"}, std::vector<Edge>{{"e0", 0, 1, len}});
    return PLFunction(std::move(g), {EdgeProfile{std::move(x), std::move(y)}});
}

double PLFunction::total_length() const
{
    double sum = 0.0;
    for (const Edge& e : graph_->edges()) sum += e.length;
    return sum;
}

double PLFunction::value(EdgeIndex e, double offset) const
{
    const auto& p = profiles_.at(e);
    if (offset <= p.x.front()) return p.y.front();
    if (offset >= p.x.back()) return p.y.back();
    auto it = std::upper_bound(p.x.begin(), p.x.end(), offset);
    const std::size_t i = static_cast<std::size_t>(it - p.x.begin());
    const double w = (offset - p.x[i - 1]) / (p.x[i] - p.x[i - 1]);
    return p.y[i - 1] + w * (p.y[i] - p.y[i - 1]);
}

std::vector<double> PLFunction::critical_values() const
{
    std::vector<double> vals;
    for (const auto& p : profiles_) vals.insert(vals.end(), p.y.begin(), p.y.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

double PLFunction::l2_norm_squared() const
{
    double sum = 0.0;
    for (const auto& p : profiles_)
        for (std::size_t i = 1; i < p.x.size(); ++i) {
            const double a = p.y[i - 1], b = p.y[i];
            sum += (p.x[i] - p.x[i - 1]) * (a * a + a * b + b * b) / 3.0;
        }
    return sum;
}

double PLFunction::dirichlet_energy() const
{
    double sum = 0.0;
    for (const auto& p : profiles_)
        for (std::size_t i = 1; i < p.x.size(); ++i) {
            const double dy = p.y[i] - p.y[i - 1];
            sum += dy * dy / (p.x[i] - p.x[i - 1]);
        }
    return sum;
}

namespace {

/// Measure of {f < t} (strict) or {f <= t} on one linear segment.
double segment_sublevel(double h, double y0, double y1, double t, bool closed)
{
    const double lo = std::min(y0, y1), hi = std::max(y0, y1);
    if (lo == hi) return (closed ? lo <= t : lo < t) ? h : 0.0;
    if (t <= lo) return 0.0;
    if (t >= hi) return h;
    return h * (t - lo) / (hi - lo);
}

double sublevel(const PLFunction& f, double t, bool closed)
{
    double sum = 0.0;
    for (const auto& p : f.profiles())
        for (std::size_t i = 1; i < p.x.size(); ++i)
            sum += segment_sublevel(p.x[i] - p.x[i - 1], p.y[i - 1], p.y[i], t, closed);
    return sum;
}

}  // namespace

double sublevel_measure_closed(const PLFunction& f, double t)
{
    return sublevel(f, t, true);
}

LevelData level_data(const PLFunction& f, double t)
{
    LevelData out;
    out.level = t;
    out.sublevel_measure = sublevel(f, t, false);
    const MetricGraph& g = f.graph();
    std::vector<bool> vertex_hit(g.vertex_count(), false);
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& p = f.profiles()[e];
        for (std::size_t i = 1; i < p.x.size(); ++i) {
            const double y0 = p.y[i - 1], y1 = p.y[i];
            if (y0 == y1 && y0 == t) out.regular = false;
            if (std::min(y0, y1) < t && t < std::max(y0, y1)) ++out.count;
        }
        // Interior breakpoints hit exactly.
        for (std::size_t i = 1; i + 1 < p.x.size(); ++i)
            if (p.y[i] == t && p.y[i - 1] != t && p.y[i + 1] != t) ++out.count;
        if (p.y.front() == t) vertex_hit[g.edge(e).from] = true;
        if (p.y.back() == t) vertex_hit[g.edge(e).to] = true;
    }
    for (bool hit : vertex_hit)
        if (hit) {
            ++out.count;
            out.regular = false;
        }
    return out;
}

namespace {

/// Sublevel measures and crossing counts at all critical values, by one
/// sweep over the sorted levels.
struct LevelSweep {
    std::vector<double> levels;
    std::vector<double> below;            // |{f < t_i}|
    std::vector<double> upto;             // |{f <= t_i}|
    std::vector<std::size_t> gap_count;   // n(t) for t in (t_i, t_{i+1})
};

LevelSweep sweep_levels(const PLFunction& f)
{
    LevelSweep out;
    out.levels = f.critical_values();
    const std::size_t k = out.levels.size();
    std::vector<double> slope_on(k, 0.0), slope_off(k, 0.0), plateau(k, 0.0);
    std::vector<long> count_delta(k + 1, 0);
    auto index_of = [&](double t) {
        return static_cast<std::size_t>(std::lower_bound(out.levels.begin(), out.levels.end(), t) - out.levels.begin());
    };
    for (const auto& p : f.profiles())
        for (std::size_t i = 1; i < p.x.size(); ++i) {
            const double h = p.x[i] - p.x[i - 1];
            const double lo = std::min(p.y[i - 1], p.y[i]), hi = std::max(p.y[i - 1], p.y[i]);
            const std::size_t a = index_of(lo), b = index_of(hi);
            if (a == b) {
                plateau[a] += h;
                continue;
            }
            slope_on[a] += h / (hi - lo);
            slope_off[b] += h / (hi - lo);
            count_delta[a] += 1;
            count_delta[b] -= 1;
        }
    out.below.assign(k, 0.0);
    out.upto.assign(k, 0.0);
    out.gap_count.assign(k > 0 ? k - 1 : 0, 0);
    double slope = 0.0;
    long active = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0) out.below[i] = out.upto[i - 1] + slope * (out.levels[i] - out.levels[i - 1]);
        out.upto[i] = out.below[i] + plateau[i];
        slope += slope_on[i] - slope_off[i];
        active += count_delta[i];
        if (i + 1 < k) out.gap_count[i] = static_cast<std::size_t>(active);
    }
    return out;
}

}  // namespace

PLFunction rearrange(const PLFunction& f)
{
    // A nondecreasing function on a single interval is its own rearrangement.
    if (f.graph().edge_count() == 1 && !f.graph().edge(0).is_loop()) {
        const auto& p = f.profiles().front();
        if (std::is_sorted(p.y.begin(), p.y.end())) return PLFunction::on_interval(p.x, p.y);
    }
    const LevelSweep sw = sweep_levels(f);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sw.levels.size(); ++i) {
        if (x.empty() || sw.below[i] > x.back()) {
            x.push_back(sw.below[i]);
            y.push_back(sw.levels[i]);
        }
        if (sw.upto[i] > x.back()) {
            x.push_back(sw.upto[i]);
            y.push_back(sw.levels[i]);
        }
    }
    if (x.size() == 1) {  // constant function
        x.push_back(f.total_length());
        y.push_back(y.front());
    }
    return PLFunction::on_interval(std::move(x), std::move(y));
}

CavalieriCheck check_cavalieri(const PLFunction& f)
{
    CavalieriCheck out;
    out.lhs = f.l2_norm_squared();
    out.rhs = rearrange(f).l2_norm_squared();
    out.difference = std::abs(out.lhs - out.rhs);
    return out;
}

std::size_t min_level_count(const PLFunction& f)
{
    const LevelSweep sw = sweep_levels(f);
    if (sw.gap_count.empty()) return 0;
    // Gaps narrower than round-off of the range (e.g. sin(pi) = 1e-16 next to 0)
    // are treated as null sets for the essential infimum.
    const double range = sw.levels.back() - sw.levels.front();
    const double negligible = 1e-12 * range;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < sw.gap_count.size(); ++i)
        if (sw.levels[i + 1] - sw.levels[i] > negligible) best = std::min(best, sw.gap_count[i]);
    return best == std::numeric_limits<std::size_t>::max() ? 0 : best;
}

PolyaCheck check_polya(const PLFunction& f)
{
    PolyaCheck out;
    out.energy = f.dirichlet_energy();
    out.rearranged_energy = rearrange(f).dirichlet_energy();
    out.min_count = min_level_count(f);
    const double n = static_cast<double>(out.min_count);
    out.scaled = n * n * out.rearranged_energy;
    if (out.scaled > 0.0) out.ratio = out.energy / out.scaled;
    return out;
}

CoareaCheck check_coarea(const PLFunction& f, const PLFunction& weight)
{
    const MetricGraph& g = f.graph();
    if (weight.profiles().size() != g.edge_count()) throw InputError("check_coarea: weight lives on a different graph");

    CoareaCheck out;
    // Left side: on each f-segment |f'| is constant and phi is piecewise linear
    // with its own breakpoints; integrate phi exactly over the merged grid.
    std::vector<double> tcuts = f.critical_values();
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& p = f.profiles()[e];
        const auto& w = weight.profiles()[e];
        for (std::size_t i = 1; i < p.x.size(); ++i) {
            const double x0 = p.x[i - 1], x1 = p.x[i];
            const double slope = std::abs(p.y[i] - p.y[i - 1]) / (x1 - x0);
            std::vector<double> pts{x0, x1};
            for (double xb : w.x)
                if (xb > x0 && xb < x1) pts.push_back(xb);
            std::sort(pts.begin(), pts.end());
            for (std::size_t j = 1; j < pts.size(); ++j)
                out.lhs += slope * (pts[j] - pts[j - 1]) * 0.5 * (weight.value(e, pts[j - 1]) + weight.value(e, pts[j]));
            for (double xb : w.x) tcuts.push_back(f.value(e, xb));
        }
    }
    std::sort(tcuts.begin(), tcuts.end());
    tcuts.erase(std::unique(tcuts.begin(), tcuts.end()), tcuts.end());

    auto integrand = [&](double t) {
        double sum = 0.0;
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
            const auto& p = f.profiles()[e];
            for (std::size_t i = 1; i < p.x.size(); ++i) {
                const double y0 = p.y[i - 1], y1 = p.y[i];
                if (std::min(y0, y1) < t && t < std::max(y0, y1)) {
                    const double x = p.x[i - 1] + (t - y0) / (y1 - y0) * (p.x[i] - p.x[i - 1]);
                    sum += weight.value(e, x);
                }
            }
        }
        return sum;
    };

    // Between consecutive cuts the integrand is linear in t; three-point
    // Gauss-Legendre is exact there.
    static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (std::size_t i = 1; i < tcuts.size(); ++i) {
        const double a = tcuts[i - 1], b = tcuts[i];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < 3; ++q) out.rhs += half * weights[q] * integrand(mid + half * nodes[q]);
    }
    out.difference = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace qg
