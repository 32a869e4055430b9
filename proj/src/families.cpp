#include "qg/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace qg {

namespace {

struct Builder {
    std::vector<std::string> ids;
    std::vector<Edge> edges;

    VertexIndex vertex(std::string id)
    {
        ids.push_back(std::move(id));
        return ids.size() - 1;
    }
    void edge(std::string id, VertexIndex a, VertexIndex b, double len)
    {
        edges.push_back({std::move(id), a, b, len});
    }
    MetricGraph build() { return MetricGraph(std::move(ids), std::move(edges)); }
};

std::vector<double> star_arms(const FamilySpec& s)
{
    if (!s.lengths.empty()) return s.lengths;
    return std::vector<double>(static_cast<std::size_t>(s.arms), s.arm_length);
}

std::vector<double> necklace_lengths(const FamilySpec& s)
{
    if (!s.lengths.empty()) return s.lengths;
    return std::vector<double>(2 * static_cast<std::size_t>(s.pumpkins), s.edge_length);
}

QuantumGraph build_comb(const FamilySpec& s)
{
    Builder b;
    const int n_teeth = s.teeth;
    std::vector<VertexIndex> shaft(static_cast<std::size_t>(n_teeth) + 1);
    for (int n = 1; n <= n_teeth; ++n) shaft[n] = b.vertex("s" + std::to_string(n));
    for (int n = 1; n <= n_teeth; ++n) {
        VertexIndex tip = b.vertex("t" + std::to_string(n));
        b.edge("tooth" + std::to_string(n), shaft[n], tip, comb_position(s.alpha, n));
    }
    for (int n = 1; n < n_teeth; ++n) {
        const double len = comb_position(s.alpha, n) - comb_position(s.alpha, n + 1);
        b.edge("shaft" + std::to_string(n), shaft[n], shaft[n + 1], len);
    }
    QuantumGraph out{b.build(), {}};
    out.conditions.end_tags[shaft[n_teeth]] = s.end_condition;
    return out;
}

QuantumGraph build_tree(const FamilySpec& s)
{
    Builder b;
    std::vector<VertexIndex> level{b.vertex("n0_0")};
    for (int g = 1; g <= s.generations; ++g) {
        std::vector<VertexIndex> next;
        const double len = std::pow(s.ratio, g - 1);
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (int c = 0; c < s.branches; ++c) {
                const std::size_t child = i * static_cast<std::size_t>(s.branches) + static_cast<std::size_t>(c);
                const std::string tag = std::to_string(g) + "_" + std::to_string(child);
                VertexIndex w = b.vertex("n" + tag);
                b.edge("e" + tag, level[i], w, len);
                next.push_back(w);
            }
        }
        level = std::move(next);
    }
    QuantumGraph out{b.build(), {}};
    if (s.generations > 0)
        for (VertexIndex leaf : level) out.conditions.end_tags[leaf] = s.end_condition;
    return out;
}

QuantumGraph build_random(const FamilySpec& s)
{
    const auto nv = static_cast<std::size_t>(s.vertices);
    SeededRng rng(*s.seed);

    // Wilson's algorithm on the complete graph K_nv, rooted at v0.
    std::vector<bool> in_tree(nv, false);
    std::vector<std::size_t> next(nv, 0);
    in_tree[0] = true;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t start = 1; start < nv; ++start) {
        std::size_t u = start;
        while (!in_tree[u]) {
            std::size_t w = rng.index(nv - 1);
            if (w >= u) ++w;
            next[u] = w;
            u = w;
        }
        u = start;
        while (!in_tree[u]) {
            in_tree[u] = true;
            pairs.emplace_back(u, next[u]);
            u = next[u];
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> used;
    for (auto [a, c] : pairs) used.insert(std::minmax(a, c));
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t c = a + 1; c < nv; ++c)
            if (!used.count({a, c})) candidates.emplace_back(a, c);
    if (candidates.size() < static_cast<std::size_t>(s.beta))
        throw InputError("random_compact: not enough vertex pairs for the requested beta");
    for (int i = 0; i < s.beta; ++i) {
        std::size_t pick = rng.index(candidates.size());
        pairs.push_back(candidates[pick]);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    Builder b;
    for (std::size_t v = 0; v < nv; ++v) b.vertex("v" + std::to_string(v));
    for (std::size_t e = 0; e < pairs.size(); ++e)
        b.edge("e" + std::to_string(e), pairs[e].first, pairs[e].second, rng.uniform(s.length_min, s.length_max));
    return {b.build(), {}};
}

}  // namespace

double SeededRng::normal()
{
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string to_string(Family f)
{
    switch (f) {
    case Family::interval: return "interval";
    case Family::star: return "star";
    case Family::loop: return "loop";
    case Family::necklace: return "necklace";
    case Family::diagonal_comb: return "diagonal_comb";
    case Family::geometric_tree: return "geometric_tree";
    case Family::lasso: return "lasso";
    case Family::random_compact: return "random_compact";
    }
    return "?";
}

Family parse_family(const std::string& s)
{
    for (Family f : {Family::interval, Family::star, Family::loop, Family::necklace, Family::diagonal_comb,
                     Family::geometric_tree, Family::lasso, Family::random_compact})
        if (to_string(f) == s) return f;
    throw InputError("unsupported family '" + s + "'");
}

void FamilySpec::validate() const
{
    auto positive = [](double x, const char* what) {
        if (!(x > 0.0) || !std::isfinite(x)) throw InputError(std::string(what) + " must be positive");
    };
    switch (family) {
    case Family::interval:
    case Family::loop: positive(length, "length"); break;
    case Family::lasso:
        positive(length, "length");
        positive(tail_length, "tail_length");
        break;
    case Family::star:
        if (lengths.empty() && arms < 1) throw InputError("star needs at least one arm");
        for (double l : star_arms(*this)) positive(l, "arm length");
        break;
    case Family::necklace:
        if (lengths.empty() && pumpkins < 1) throw InputError("necklace needs at least one pumpkin");
        if (lengths.size() % 2 != 0) throw InputError("necklace lengths come in parallel pairs");
        for (double l : necklace_lengths(*this)) positive(l, "necklace edge length");
        break;
    case Family::diagonal_comb:
        positive(alpha, "alpha");
        if (teeth < 1) throw InputError("teeth must be >= 1");
        break;
    case Family::geometric_tree:
        if (branches < 1) throw InputError("branches must be >= 1");
        if (generations < 1) throw InputError("generations must be >= 1");
        positive(ratio, "ratio");
        break;
    case Family::random_compact:
        if (vertices < 1) throw InputError("vertices must be >= 1");
        if (beta < 0) throw InputError("beta must be >= 0");
        positive(length_min, "length_min");
        if (!(length_max >= length_min)) throw InputError("length_max must be >= length_min");
        if (!seed) throw InputError("random_compact requires a seed");
        if (vertices == 1 && beta > 0) throw InputError("random_compact: not enough vertex pairs for the requested beta");
        break;
    }
}

double comb_position(double alpha, int n)
{
    return std::pow(static_cast<double>(n), -alpha);
}

double comb_limit_length(double alpha)
{
    if (!(alpha > 1.0)) throw InputError("diagonal comb has infinite length for alpha <= 1");
    return 1.0 + std::riemann_zeta(alpha);
}

QuantumGraph make_family(const FamilySpec& s)
{
    s.validate();
    switch (s.family) {
    case Family::interval: {
        Builder b;
        auto v0 = b.vertex("v0");
        auto v1 = b.vertex("v1");
        b.edge("e0", v0, v1, s.length);
        return {b.build(), {}};
    }
    case Family::loop: {
        Builder b;
        auto v0 = b.vertex("v0");
        b.edge("e0", v0, v0, s.length);
        return {b.build(), {}};
    }
    case Family::lasso: {
        Builder b;
        auto v0 = b.vertex("v0");
        auto v1 = b.vertex("v1");
        b.edge("loop", v0, v0, s.length);
        b.edge("tail", v0, v1, s.tail_length);
        return {b.build(), {}};
    }
    case Family::star: {
        Builder b;
        auto c = b.vertex("c");
        auto arms = star_arms(s);
        for (std::size_t i = 0; i < arms.size(); ++i) {
            auto tip = b.vertex("x" + std::to_string(i + 1));
            b.edge("arm" + std::to_string(i + 1), c, tip, arms[i]);
        }
        return {b.build(), {}};
    }
    case Family::necklace: {
        Builder b;
        auto lens = necklace_lengths(s);
        const std::size_t m = lens.size() / 2;
        std::vector<VertexIndex> beads;
        for (std::size_t i = 0; i <= m; ++i) beads.push_back(b.vertex("p" + std::to_string(i)));
        for (std::size_t i = 0; i < m; ++i) {
            b.edge("a" + std::to_string(i), beads[i], beads[i + 1], lens[2 * i]);
            b.edge("b" + std::to_string(i), beads[i], beads[i + 1], lens[2 * i + 1]);
        }
        return {b.build(), {}};
    }
    case Family::diagonal_comb: return build_comb(s);
    case Family::geometric_tree: return build_tree(s);
    case Family::random_compact: return build_random(s);
    }
    throw InputError("unsupported family");
}

double family_total_length(const FamilySpec& s)
{
    switch (s.family) {
    case Family::interval:
    case Family::loop: return s.length;
    case Family::lasso: return s.length + s.tail_length;
    case Family::star: {
        double sum = 0.0;
        for (double l : star_arms(s)) sum += l;
        return sum;
    }
    case Family::necklace: {
        double sum = 0.0;
        for (double l : necklace_lengths(s)) sum += l;
        return sum;
    }
    case Family::diagonal_comb: {
        double teeth = 0.0;
        for (int n = 1; n <= s.teeth; ++n) teeth += comb_position(s.alpha, n);
        return 1.0 - comb_position(s.alpha, s.teeth) + teeth;
    }
    case Family::geometric_tree: {
        double sum = 0.0;
        for (int g = 1; g <= s.generations; ++g)
            sum += std::pow(static_cast<double>(s.branches), g) * std::pow(s.ratio, g - 1);
        return sum;
    }
    case Family::random_compact: {
        auto qg = make_family(s);
        double sum = 0.0;
        for (const auto& e : qg.graph.edges()) sum += e.length;
        return sum;
    }
    }
    return 0.0;
}

FamilySpec random_pool_spec(std::uint64_t seed)
{
    SeededRng rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    FamilySpec s;
    s.family = Family::random_compact;
    s.beta = static_cast<int>(rng.index(3));
    // beta extra edges need that many non-tree pairs: C(V,2) - (V-1) >= beta.
    const int lo = s.beta == 0 ? 2 : (s.beta == 1 ? 3 : 4);
    const int hi = 9 - s.beta;
    s.vertices = lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
    s.length_min = 0.3;
    s.length_max = 2.0;
    s.seed = seed;
    return s;
}

}  // namespace qg
