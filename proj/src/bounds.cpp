#include "qg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qg/families.hpp"
#include "qg/parallel.hpp"
#include "qg/secular.hpp"
#include "qg/surgery.hpp"

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
constexpr double kCentreTol = 1e-9;

std::set<VertexIndex> leaves(const MetricGraph& g)
{
    std::set<VertexIndex> out;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) == 1) out.insert(v);
    return out;
}

std::optional<double> registered_cheeger(const MetricGraph& g)
{
    const QuantumGraph reduced = merge_all_dummies(QuantumGraph{g, {}});
    const MetricGraph& r = reduced.graph;
    const double L = total_length(r);
    if (r.edge_count() == 1) return r.edge(0).is_loop() ? 4.0 / L : 2.0 / L;

    std::size_t hubs = 0;
    for (VertexIndex v = 0; v < r.vertex_count(); ++v) {
        if (r.degree(v) >= 3)
            ++hubs;
        else if (r.degree(v) != 1)
            return std::nullopt;
    }
    if (hubs != 1) return std::nullopt;
    const double arm = r.edge(0).length;
    for (const Edge& e : r.edges())
        if (e.is_loop() || std::abs(e.length - arm) > 1e-12 * arm) return std::nullopt;
    // Best cut: the centre, with half of the arms (rounded down) on one side.
    return 1.0 / (static_cast<double>(r.edge_count() / 2) * arm);
}

std::string letter(BoundId id) { return to_string(id).substr(0, 1); }

}  // namespace

// ---------------------------------------------------------------------------

std::size_t bridge_count(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbour, edge)
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (a == b) continue;
        adj.at(a).emplace_back(b, e);
        adj.at(b).emplace_back(a, e);
    }
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> disc(n, kNone), low(n, 0);
    std::size_t timer = 0, bridges = 0;

    struct Frame {
        std::size_t v, parent_edge, next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (disc[root] != kNone) continue;
        std::vector<Frame> stack{{root, kNone, 0}};
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[f.v].size()) {
                const auto [w, e] = adj[f.v][f.next++];
                if (e == f.parent_edge) continue;
                if (disc[w] == kNone) {
                    disc[w] = low[w] = timer++;
                    stack.push_back({w, e, 0});
                } else {
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
                continue;
            }
            const Frame done = f;
            stack.pop_back();
            if (!stack.empty()) {
                Frame& parent = stack.back();
                low[parent.v] = std::min(low[parent.v], low[done.v]);
                if (low[done.v] > disc[parent.v]) ++bridges;
            }
        }
    }
    return bridges;
}

Hypotheses hypothesis_check(const QuantumGraph& q)
{
    const MetricGraph& g = q.graph;
    Hypotheses h;
    h.connected = g.vertex_count() > 0 && g.is_connected();
    const auto dir = q.conditions.dirichlet_set();
    h.has_dirichlet = !dir.empty();
    if (!h.connected) return h;

    h.is_tree = betti_number(g) == 0;

    std::vector<std::pair<std::size_t, std::size_t>> ends;
    ends.reserve(g.edge_count());
    for (const Edge& e : g.edges()) ends.emplace_back(e.from, e.to);
    h.doubly_connected = bridge_count(g.vertex_count(), ends) == 0;

    if (h.has_dirichlet) {
        // Collapse the Dirichlet set to the index of its first member.
        const VertexIndex hub = *dir.begin();
        auto merged = ends;
        for (auto& [a, b] : merged) {
            if (dir.count(a)) a = hub;
            if (dir.count(b)) b = hub;
        }
        h.dirichlet_bridgeless = bridge_count(g.vertex_count(), merged) == 0;

        std::vector<std::vector<double>> dist;
        dist.reserve(dir.size());
        for (VertexIndex d : dir) dist.push_back(vertex_distances(g, d));
        const auto leaf_set = leaves(g);
        for (VertexIndex c = 0; c < g.vertex_count(); ++c) {
            double lo = dist.front()[c], hi = lo;
            for (const auto& d : dist) {
                lo = std::min(lo, d[c]);
                hi = std::max(hi, d[c]);
            }
            if (hi - lo > kCentreTol * std::max(1.0, hi)) continue;
            h.centred = true;
            if (h.is_tree) {
                auto expected = leaf_set;
                expected.erase(c);
                if (expected == dir) h.centred_leaf_set = true;
            }
        }
        h.leaves_dirichlet = h.is_tree && dir == leaf_set;
    }
    h.cheeger_constant = registered_cheeger(g);
    return h;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::equality: return "equality";
    case Verdict::violated: return "violated";
    case Verdict::hypotheses_not_met: return "hypotheses-not-met";
    }
    return "?";
}

std::string to_string(BoundId id)
{
    switch (id) {
    case BoundId::length_kth: return "a:length-kth";
    case BoundId::length_dirichlet: return "b:length-dirichlet";
    case BoundId::doubly_connected_gap: return "c:doubly-connected-gap";
    case BoundId::two_path_dirichlet: return "d:two-path-dirichlet";
    case BoundId::length_diameter_lower: return "e:length-diameter-lower";
    case BoundId::tree_diameter: return "f:tree-diameter";
    case BoundId::centred_inradius: return "g:centred-inradius";
    case BoundId::cheeger: return "h:cheeger";
    case BoundId::length_diameter_upper: return "i:length-diameter-upper";
    case BoundId::betti_diameter_upper: return "j:betti-diameter-upper";
    }
    return "?";
}

BoundId parse_bound_id(const std::string& s)
{
    for (BoundId id : kAllBounds)
        if (s == to_string(id) || s == letter(id)) return id;
    throw InputError("unknown bound id '" + s + "'");
}

std::string statement(BoundId id)
{
    switch (id) {
    case BoundId::length_kth: return "mu_k >= pi^2 k^2 / (4 L^2), k >= 2";
    case BoundId::length_dirichlet: return "lambda_1 >= pi^2 / (4 L^2)";
    case BoundId::doubly_connected_gap: return "mu_2 >= 4 pi^2 / L^2";
    case BoundId::two_path_dirichlet: return "lambda_1 >= pi^2 / L^2";
    case BoundId::length_diameter_lower: return "mu_2 >= 2 / (L D)";
    case BoundId::tree_diameter: return "lambda_1 >= pi^2 / D^2";
    case BoundId::centred_inradius: return "lambda_1 >= pi^2 / (4 Inr^2)";
    case BoundId::cheeger: return "mu_2 >= h^2 / 4";
    case BoundId::length_diameter_upper: return "mu_2 <= pi^2 (4 L - 3 D) / D^3";
    case BoundId::betti_diameter_upper: return "mu_k <= (k + beta - 1)^2 pi^2 / D^2, k >= 2";
    }
    return "?";
}

Verdict classify(double margin, double eigen_tol, double geometry_tol)
{
    if (margin < -eigen_tol) return Verdict::violated;
    if (std::abs(margin) <= eigen_tol + geometry_tol) return Verdict::equality;
    return Verdict::holds;
}

std::vector<BoundReport> check_bounds(const QuantumGraph& q, const BoundInputs& in)
{
    const Hypotheses h = hypothesis_check(q);
    const double rel = in.eigen_rel_tol;

    auto mu = [&](std::size_t k) {
        if (!in.standard || in.standard->size() < k)
            throw InputError("check_bounds: standard spectrum with at least " + std::to_string(k) + " values required");
        return (*in.standard)[k - 1];
    };
    auto lambda1 = [&] {
        if (!in.mixed || in.mixed->size() < 1) throw InputError("check_bounds: spectrum under the Dirichlet set required");
        return (*in.mixed)[0];
    };
    auto geometry = [&]() -> const GeometryReport& {
        if (!in.geometry) throw InputError("check_bounds: geometry report required");
        return *in.geometry;
    };
    auto diam = [&]() -> const DiameterEstimate& {
        const DiameterEstimate& d = geometry().diameter;
        if (!(d.value > 0.0)) throw InputError("check_bounds: positive diameter required");
        return d;
    };

    auto base = [&](BoundId id, std::vector<std::pair<std::string, bool>> hyps) {
        BoundReport r;
        r.bound_id = to_string(id);
        r.statement = statement(id);
        r.upper = id == BoundId::length_diameter_upper || id == BoundId::betti_diameter_upper;
        hyps.insert(hyps.begin(), {{"connected", h.connected}, {"finite_length", h.finite_length}});
        r.hypotheses = std::move(hyps);
        return r;
    };
    auto met = [](const BoundReport& r) {
        return std::all_of(r.hypotheses.begin(), r.hypotheses.end(), [](const auto& p) { return p.second; });
    };
    auto evaluate = [&](BoundReport r, std::size_t k, double eig, double bound, double geo_tol) {
        r.k = k;
        r.eigenvalue = eig;
        r.bound_value = bound;
        r.eigen_tol = rel * std::max(std::abs(eig), std::abs(bound));
        r.geometry_tol = geo_tol;
        r.margin = r.upper ? bound - eig : eig - bound;
        r.verdict = classify(r.margin, r.eigen_tol, r.geometry_tol);
        return r;
    };
    // Keeps the candidate with the smallest relative margin.
    auto tightest = [](std::vector<BoundReport> candidates) {
        auto relative = [](const BoundReport& r) {
            return r.margin / std::max({std::abs(r.eigenvalue), std::abs(r.bound_value), 1e-300});
        };
        return *std::min_element(candidates.begin(), candidates.end(),
                                 [&](const auto& x, const auto& y) { return relative(x) < relative(y); });
    };

    std::vector<BoundReport> out;
    const double L = h.connected ? total_length(q.graph) : 0.0;

    for (BoundId id : kAllBounds) {
        BoundReport r;
        switch (id) {
        case BoundId::length_kth:
        case BoundId::betti_diameter_upper: r = base(id, {}); break;
        case BoundId::length_dirichlet: r = base(id, {{"has_dirichlet", h.has_dirichlet}}); break;
        case BoundId::doubly_connected_gap: r = base(id, {{"doubly_connected", h.doubly_connected}}); break;
        case BoundId::two_path_dirichlet:
            r = base(id, {{"has_dirichlet", h.has_dirichlet}, {"dirichlet_bridgeless", h.dirichlet_bridgeless}});
            break;
        case BoundId::length_diameter_lower:
        case BoundId::length_diameter_upper: r = base(id, {}); break;
        case BoundId::tree_diameter:
            r = base(id, {{"is_tree", h.is_tree}, {"leaves_dirichlet", h.leaves_dirichlet}});
            break;
        case BoundId::centred_inradius:
            r = base(id, {{"is_tree", h.is_tree}, {"centred", h.centred}, {"centred_leaf_set", h.centred_leaf_set}});
            break;
        case BoundId::cheeger: r = base(id, {{"cheeger_registered", h.cheeger_constant.has_value()}}); break;
        }
        if (!met(r)) {
            r.verdict = Verdict::hypotheses_not_met;
            out.push_back(std::move(r));
            continue;
        }

        switch (id) {
        case BoundId::length_kth: {
            if (!in.standard || in.standard->size() < 2) mu(2);
            std::vector<BoundReport> cands;
            for (std::size_t k = 2; k <= in.standard->size(); ++k) {
                const double kk = static_cast<double>(k);
                cands.push_back(evaluate(r, k, mu(k), kPi2 * kk * kk / (4.0 * L * L), 0.0));
            }
            r = tightest(std::move(cands));
            break;
        }
        case BoundId::length_dirichlet: r = evaluate(r, 1, lambda1(), kPi2 / (4.0 * L * L), 0.0); break;
        case BoundId::doubly_connected_gap: r = evaluate(r, 2, mu(2), 4.0 * kPi2 / (L * L), 0.0); break;
        case BoundId::two_path_dirichlet: r = evaluate(r, 1, lambda1(), kPi2 / (L * L), 0.0); break;
        case BoundId::length_diameter_lower: {
            const auto& d = diam();
            const double lenient = 2.0 / (L * d.upper());
            r = evaluate(r, 2, mu(2), lenient, 2.0 / (L * d.value) - lenient);
            break;
        }
        case BoundId::tree_diameter: {
            const auto& d = diam();
            const double lenient = kPi2 / (d.upper() * d.upper());
            r = evaluate(r, 1, lambda1(), lenient, kPi2 / (d.value * d.value) - lenient);
            break;
        }
        case BoundId::centred_inradius: {
            const auto& inr = geometry().inradius;
            if (!inr || !(*inr > 0.0)) throw InputError("check_bounds: inradius required");
            r = evaluate(r, 1, lambda1(), kPi2 / (4.0 * *inr * *inr), 0.0);
            break;
        }
        case BoundId::cheeger: {
            const double hc = *h.cheeger_constant;
            r = evaluate(r, 2, mu(2), hc * hc / 4.0, 0.0);
            break;
        }
        case BoundId::length_diameter_upper: {
            const auto& d = diam();
            auto U = [&](double D) { return kPi2 * (4.0 * L - 3.0 * D) / (D * D * D); };
            r = evaluate(r, 2, mu(2), U(d.value), U(d.value) - U(d.upper()));
            break;
        }
        case BoundId::betti_diameter_upper: {
            const auto& d = diam();
            if (!in.standard || in.standard->size() < 2) mu(2);
            const double beta = static_cast<double>(betti_number(q.graph));
            std::vector<BoundReport> cands;
            for (std::size_t k = 2; k <= in.standard->size(); ++k) {
                const double c = (static_cast<double>(k) + beta - 1.0);
                const double at_lo = c * c * kPi2 / (d.value * d.value);
                const double at_hi = c * c * kPi2 / (d.upper() * d.upper());
                cands.push_back(evaluate(r, k, mu(k), at_lo, at_lo - at_hi));
            }
            r = tightest(std::move(cands));
            break;
        }
        }
        out.push_back(std::move(r));
    }
    return out;
}

Spectrum solve_spectrum(const QuantumGraph& q, std::size_t count, SpectrumMethod method, double mesh_h,
                        std::size_t dof_cap)
{
    switch (method) {
    case SpectrumMethod::fem: return solve_fem(q, count, mesh_h, dof_cap);
    case SpectrumMethod::fem_extrapolated: return solve_extrapolated(q, count, mesh_h, dof_cap);
    case SpectrumMethod::secular: {
        SecularSettings s;
        s.count = count;
        return eigs_by_scan(q, s);
    }
    }
    throw InputError("unknown spectrum method");
}

std::vector<BoundReport> evaluate_bounds(const QuantumGraph& q, const BoundSettings& settings)
{
    BoundInputs in;
    in.eigen_rel_tol = settings.eigen_rel_tol;
    const QuantumGraph standard{q.graph, q.conditions.standard_only()};
    in.standard = solve_spectrum(standard, settings.count, settings.method, settings.mesh_h, settings.dof_cap);
    if (q.conditions.has_dirichlet())
        in.mixed = solve_spectrum(q, 1, settings.method, settings.mesh_h, settings.dof_cap);
    in.geometry = geometry_report(q.graph, q.conditions, settings.resolution);
    return check_bounds(q, in);
}

bool any_violated(const std::vector<BoundReport>& reports)
{
    return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.verdict == Verdict::violated; });
}

// ---------------------------------------------------------------------------

QuantumGraph letter_t_graph(double long_arm, double short_arm)
{
    FamilySpec s;
    s.family = Family::star;
    s.lengths = {long_arm, long_arm, short_arm};
    QuantumGraph q = make_family(s);
    for (VertexIndex v = 0; v < q.graph.vertex_count(); ++v)
        if (q.graph.degree(v) == 1) q.conditions.dirichlet.insert(v);
    return q;
}

std::vector<CanonicalInstance> canonical_instances()
{
    const std::string a = to_string(BoundId::length_kth), b = to_string(BoundId::length_dirichlet),
                      c = to_string(BoundId::doubly_connected_gap), d = to_string(BoundId::two_path_dirichlet),
                      f = to_string(BoundId::tree_diameter), g = to_string(BoundId::centred_inradius),
                      i = to_string(BoundId::length_diameter_upper), j = to_string(BoundId::betti_diameter_upper);
    auto tips_dirichlet = [](QuantumGraph q) {
        for (VertexIndex v = 0; v < q.graph.vertex_count(); ++v)
            if (q.graph.degree(v) == 1) q.conditions.dirichlet.insert(v);
        return q;
    };
    std::vector<CanonicalInstance> out;

    for (int k = 2; k <= 5; ++k) {
        FamilySpec s;
        s.family = Family::star;
        s.arms = k;
        s.arm_length = 1.0;
        // The 2-star is the interval of length 2, which also attains i.
        std::vector<std::string> eq = k == 2 ? std::vector<std::string>{a, i, j} : std::vector<std::string>{a, j};
        out.push_back({"star-" + std::to_string(k), make_family(s), eq, {a}});
    }
    {
        FamilySpec s;
        s.family = Family::interval;
        s.length = 1.0;
        QuantumGraph q = make_family(s);
        q.conditions.dirichlet.insert(q.graph.vertex_index("v1"));
        out.push_back({"interval-dirichlet-neumann", q, {a, b, g, i, j}, {b}});
    }
    {
        FamilySpec s;
        s.family = Family::loop;
        s.length = 1.0;
        out.push_back({"loop", make_family(s), {c}, {c}});
    }
    for (int p : {2, 3}) {
        FamilySpec s;
        s.family = Family::necklace;
        s.pumpkins = p;
        s.edge_length = 1.0 / (2.0 * p);
        out.push_back({"necklace-" + std::to_string(p), make_family(s), {c}, {c}});
    }
    for (int p : {1, 3}) {
        FamilySpec s;
        s.family = Family::necklace;
        s.pumpkins = p;
        s.edge_length = 1.0 / (2.0 * p);
        QuantumGraph q = make_family(s);
        q.conditions.dirichlet.insert(q.graph.vertex_index("p0"));
        out.push_back({"necklace-" + std::to_string(p) + "-dirichlet", q, {c, d}, {d}});
    }
    for (int k : {3, 4}) {
        FamilySpec s;
        s.family = Family::star;
        s.arms = k;
        s.arm_length = 1.0;
        out.push_back({"star-" + std::to_string(k) + "-dirichlet", tips_dirichlet(make_family(s)), {a, f, g, j}, {g}});
    }
    // mu_2 of the letter T is pi^2/4 (antisymmetric mode on the long arms), which
    // meets j at D = 2.
    out.push_back({"letter-t", letter_t_graph(), {j}, {}});
    return out;
}

std::vector<BoundReport> equality_suite(const BoundSettings& settings)
{
    BoundSettings s = settings;
    s.resolution = std::min(s.resolution, 1e-6);
    const auto instances = canonical_instances();
    auto per_instance = parallel_map(instances.size(), [&](std::size_t idx) {
        const CanonicalInstance& inst = instances[idx];
        std::vector<BoundReport> picked;
        for (auto& r : evaluate_bounds(inst.graph, s)) {
            if (std::find(inst.targets.begin(), inst.targets.end(), r.bound_id) == inst.targets.end()) continue;
            r.instance = inst.name;
            picked.push_back(std::move(r));
        }
        return picked;
    });
    std::vector<BoundReport> out;
    for (auto& v : per_instance)
        for (auto& r : v) out.push_back(std::move(r));

    // Without a centre vertex the inradius bound fails by a clear margin.
    const QuantumGraph t = letter_t_graph();
    const double inr = inradius(t.graph, t.conditions);
    BoundReport r;
    r.bound_id = to_string(BoundId::centred_inradius) + "+strict";
    r.statement = "lambda_1 <= pi^2 / (4 Inr^2) - 1/2 without a centre vertex";
    r.upper = true;
    r.instance = "letter-t";
    const Hypotheses h = hypothesis_check(t);
    r.hypotheses = {{"is_tree", h.is_tree}, {"not_centred", !h.centred}};
    r.k = 1;
    r.eigenvalue = solve_spectrum(t, 1, s.method, s.mesh_h, s.dof_cap)[0];
    r.bound_value = kPi2 / (4.0 * inr * inr) - 0.5;
    r.eigen_tol = s.eigen_rel_tol * r.eigenvalue;
    r.margin = r.bound_value - r.eigenvalue;
    r.verdict = classify(r.margin, r.eigen_tol, 0.0);
    out.push_back(std::move(r));
    return out;
}

// ---------------------------------------------------------------------------

double CombProbe::value(double x) const
{
    if (x <= rise_start || x >= fall_end) return 0.0;
    const double w = peak - rise_start;
    return x <= peak ? (x - rise_start) / w : (fall_end - x) / w;
}

CombProbe comb_test_function(double alpha, long n)
{
    if (!(alpha > 0.0 && alpha <= 0.5)) throw InputError("comb probe needs 0 < alpha <= 1/2");
    if (n < 2) throw InputError("comb probe needs n >= 2");
    CombProbe p;
    p.alpha = alpha;
    p.n = n;
    p.rise_start = std::pow(2.0 * static_cast<double>(n), -alpha);
    p.peak = std::pow(static_cast<double>(n), -alpha);
    p.fall_end = 2.0 * p.peak - p.rise_start;
    if (p.fall_end > 1.0) throw InputError("comb probe support leaves the shaft");
    const double w = p.peak - p.rise_start;
    p.energy = 2.0 / w;
    p.shaft_mass = 2.0 * w / 3.0;

    auto pos = [alpha](long k) { return std::pow(static_cast<double>(k), -alpha); };
    long first = static_cast<long>(std::floor(std::pow(p.fall_end, -1.0 / alpha)));
    while (first > 1 && pos(first - 1) < p.fall_end) --first;
    while (pos(first) >= p.fall_end) ++first;
    p.first_tooth = first;
    p.last_tooth = 2 * n;
    long double teeth = 0.0L;
    for (long k = first; k <= p.last_tooth; ++k) {
        const double x = pos(k);
        const double v = p.value(x);
        teeth += static_cast<long double>(x) * v * v;
    }
    p.teeth_mass = static_cast<double>(teeth);
    p.mass = p.shaft_mass + p.teeth_mass;
    p.rayleigh = p.energy / p.mass;
    return p;
}

double comb_probe_quadrature(double alpha, long n)
{
    const CombProbe probe = comb_test_function(alpha, n);
    FamilySpec s;
    s.family = Family::diagonal_comb;
    s.alpha = alpha;
    s.teeth = static_cast<int>(2 * n + 1);
    auto graph = std::make_shared<const MetricGraph>(make_family(s).graph);
    const int N = s.teeth;

    std::vector<PLFunction::EdgeProfile> prof(graph->edge_count());
    for (int k = 1; k <= N; ++k) {
        const EdgeIndex e = graph->edge_index("tooth" + std::to_string(k));
        const double v = probe.value(comb_position(alpha, k));
        prof[e] = {{0.0, graph->edge(e).length}, {v, v}};
    }
    const double kinks[] = {probe.rise_start, probe.peak, probe.fall_end};
    const double kink_values[] = {0.0, 1.0, 0.0};
    for (int k = 1; k < N; ++k) {
        const EdgeIndex e = graph->edge_index("shaft" + std::to_string(k));
        const double top = comb_position(alpha, k), bottom = comb_position(alpha, k + 1);
        const double len = graph->edge(e).length;
        auto& pr = prof[e];
        pr.x = {0.0};
        pr.y = {probe.value(top)};
        for (int i = 0; i < 3; ++i) {
            if (kinks[i] < top && kinks[i] > bottom) {
                pr.x.push_back(top - kinks[i]);
                pr.y.push_back(kink_values[i]);
            }
        }
        pr.x.push_back(len);
        pr.y.push_back(probe.value(bottom));
    }
    const PLFunction f(graph, std::move(prof));
    return f.dirichlet_energy() / f.l2_norm_squared();
}

double comb_probe_ceiling() { return 64.0 / (std::numbers::sqrt2 - 1.0); }

std::vector<bool> comb_core_edges(const QuantumGraph& comb, int m)
{
    std::vector<bool> core(comb.graph.edge_count(), false);
    for (int n = 1; n <= m; ++n) {
        const auto tooth = comb.graph.find_edge("tooth" + std::to_string(n));
        if (!tooth) throw InputError("comb core larger than the truncation");
        core[*tooth] = true;
        if (n < m) core[comb.graph.edge_index("shaft" + std::to_string(n))] = true;
    }
    return core;
}

std::vector<PhaseRow> phase_portrait(const std::vector<double>& alphas, const std::vector<long>& ns,
                                     const PhasePortraitSettings& settings)
{
    auto per_alpha = parallel_map(alphas.size(), [&](std::size_t ia) {
        const double alpha = alphas[ia];
        std::vector<PhaseRow> rows;
        for (long n : ns) {
            PhaseRow r{alpha, "rayleigh", static_cast<double>(n), std::nullopt};
            if (alpha > 0.0 && alpha <= 0.5) {
                try {
                    r.value = comb_test_function(alpha, n).rayleigh;
                } catch (const InputError&) {
                }
            }
            rows.push_back(r);
        }

        FamilySpec s;
        s.family = Family::diagonal_comb;
        s.alpha = alpha;
        s.teeth = settings.teeth;
        s.end_condition = settings.end_condition;
        const QuantumGraph comb = make_family(s);
        const FemSystem sys = assemble(mesh(comb, settings.mesh_h, settings.dof_cap));
        for (int m : settings.cores) {
            PhaseRow r{alpha, "tail", static_cast<double>(m), std::nullopt};
            if (m >= 1 && m < settings.teeth) r.value = tail_indicator(sys, comb_core_edges(comb, m)).sigma;
            rows.push_back(r);
        }

        const VertexIndex end = comb.graph.vertex_index("s" + std::to_string(settings.teeth));
        const auto vols = annulus_volumes(comb.graph, end, harmonic_radii(settings.annulus_k_max));
        for (std::size_t k = 0; k < vols.volumes.size(); ++k)
            rows.push_back({alpha, "annulus", static_cast<double>(k + 1), vols.volumes[k]});
        return rows;
    });
    std::vector<PhaseRow> out;
    for (auto& v : per_alpha) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// ---------------------------------------------------------------------------

bool InterlacingReport::holds() const
{
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.lower_ok && r.upper_ok; });
}

InterlacingReport surgery_interlacing_check(const QuantumGraph& original, const QuantumGraph& cut, int cuts,
                                            const InterlacingSettings& settings)
{
    if (cuts < 0) throw InputError("cut count must be nonnegative");
    const auto j = static_cast<std::size_t>(cuts);
    const QuantumGraph g{original.graph, original.conditions.standard_only()};
    const QuantumGraph h{cut.graph, cut.conditions.standard_only()};
    const Spectrum before = solve_spectrum(g, settings.k_max, settings.method, settings.mesh_h);
    const Spectrum after = solve_spectrum(h, settings.k_max + j, settings.method, settings.mesh_h);

    InterlacingReport rep;
    rep.cuts = cuts;
    rep.disconnected = !cut.graph.is_connected();
    rep.tolerance = settings.rel_tol;
    for (std::size_t k = 1; k <= settings.k_max; ++k) {
        InterlacingRow row;
        row.k = k;
        row.original = before[k - 1];
        row.cut = after[k - 1];
        row.cut_shifted = after[k - 1 + j];
        auto slack = [&](double x, double y) { return settings.rel_tol * std::max(std::abs(x), std::abs(y)) + 1e-9; };
        row.lower_ok = row.original >= row.cut - slack(row.original, row.cut);
        row.upper_ok = row.original <= row.cut_shifted + slack(row.original, row.cut_shifted);
        rep.rows.push_back(row);
    }
    return rep;
}

RandomCut random_cuts(const QuantumGraph& q, int cuts, std::uint64_t seed)
{
    SeededRng rng(seed);
    RandomCut out{QuantumGraph{q.graph, q.conditions.standard_only()}, 0, false};
    for (int c = 0; c < cuts; ++c) {
        std::vector<VertexIndex> candidates;
        for (VertexIndex v = 0; v < out.graph.graph.vertex_count(); ++v)
            if (out.graph.graph.degree(v) >= 2) candidates.push_back(v);
        if (candidates.empty()) throw InputError("no vertex of degree >= 2 left to cut");
        const VertexIndex v = candidates[rng.index(candidates.size())];
        const auto& inc = out.graph.graph.incident(v);
        std::vector<std::vector<EdgeEnd>> parts(2);
        parts[0].push_back(inc[0]);
        parts[1].push_back(inc[1]);
        for (std::size_t i = 2; i < inc.size(); ++i) parts[rng.index(2)].push_back(inc[i]);
        CutResult r = cut_vertex(out.graph, v, parts);
        out.graph = std::move(r.graph);
        out.cuts += r.cuts;
        out.disconnected = out.disconnected || r.disconnected;
    }
    out.disconnected = !out.graph.graph.is_connected();
    return out;
}

DirichletCutReport dirichlet_cut_check(const QuantumGraph& q, EdgeIndex edge, double mesh_h)
{
    const MetricGraph& g = q.graph;
    const Edge& e = g.edge(edge);
    const auto leaf_ok = [&](VertexIndex v) { return g.degree(v) == 1 && q.conditions.is_dirichlet(v); };
    VertexIndex interface_v;
    if (leaf_ok(e.to))
        interface_v = e.from;
    else if (leaf_ok(e.from))
        interface_v = e.to;
    else
        throw InputError("the removed edge must end in a Dirichlet leaf");
    for (VertexIndex v : q.conditions.dirichlet_set())
        if (g.degree(v) != 1) throw InputError("Dirichlet cut check needs the Dirichlet set among the leaves");

    DirichletCutReport rep;
    const FemSystem sys = assemble(mesh(q, mesh_h));
    const Spectrum ground = solve_eigs(sys, 1);
    Eigen::VectorXd u = ground.eigenvectors.col(0);
    if (u.sum() < 0.0) u = -u;
    auto nodal = [&](std::size_t node) {
        const auto idx = sys.mesh.free_index[node];
        return idx < 0 ? 0.0 : u(idx);
    };
    const int segs = sys.mesh.segments[edge];
    const double w = sys.mesh.width(edge);
    const bool from_side = e.from == interface_v;
    const std::size_t at = sys.mesh.node(edge, from_side ? 0 : segs);
    const std::size_t next = sys.mesh.node(edge, from_side ? 1 : segs - 1);
    rep.derivatives = {(nodal(next) - nodal(at)) / w};

    const double scale = std::sqrt(ground[0]) * u.cwiseAbs().maxCoeff();
    const double dtol = 1e-3 * scale;
    rep.sign_hypothesis = rep.derivatives[0] <= dtol;
    rep.strict = rep.derivatives[0] < -dtol;
    rep.skipped = !rep.sign_hypothesis;

    rep.lambda_full = solve_extrapolated(q, 1, mesh_h)[0];
    rep.lambda_cut = solve_extrapolated(remove_edge(q, edge), 1, mesh_h)[0];
    const double tol = 1e-8 * rep.lambda_full;
    rep.holds = rep.strict ? rep.lambda_full > rep.lambda_cut + tol : rep.lambda_full >= rep.lambda_cut - tol;
    return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const BoundReport& r)
{
    nlohmann::json hyps = nlohmann::json::object();
    for (const auto& [name, ok] : r.hypotheses) hyps[name] = ok;
    nlohmann::json j = {
        {"bound_id", r.bound_id},
        {"statement", r.statement},
        {"relation", r.upper ? "upper" : "lower"},
        {"hypotheses", hyps},
        {"verdict", to_string(r.verdict)},
    };
    if (!r.instance.empty()) j["instance"] = r.instance;
    if (r.verdict != Verdict::hypotheses_not_met) {
        j["k"] = r.k;
        j["bound_value"] = r.bound_value;
        j["eigenvalue"] = r.eigenvalue;
        j["eigen_tol"] = r.eigen_tol;
        j["geometry_tol"] = r.geometry_tol;
        j["margin"] = r.margin;
    }
    return j;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundReport>& reports)
{
    out << "instance,bound_id,relation,k,bound_value,eigenvalue,eigen_tol,geometry_tol,margin,verdict,hypotheses\n";
    const auto old = out.precision(17);
    for (const auto& r : reports) {
        std::string hyps;
        for (const auto& [name, ok] : r.hypotheses) hyps += (hyps.empty() ? "" : ";") + name + "=" + (ok ? "1" : "0");
        out << r.instance << ',' << r.bound_id << ',' << (r.upper ? "upper" : "lower") << ',';
        if (r.verdict == Verdict::hypotheses_not_met)
            out << ",,,,,,";
        else
            out << r.k << ',' << r.bound_value << ',' << r.eigenvalue << ',' << r.eigen_tol << ',' << r.geometry_tol
                << ',' << r.margin << ',';
        out << to_string(r.verdict) << ',' << hyps << '\n';
    }
    out.precision(old);
}

}  // namespace qg
