#include "qg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qg/bounds.hpp"
#include "qg/exhaustion.hpp"
#include "qg/families.hpp"
#include "qg/geometry.hpp"
#include "qg/io.hpp"
#include "qg/secular.hpp"

namespace qg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string command;
    std::string graph_path;
    std::string family;
    std::string dirichlet;
    std::size_t k = 0;
    double mesh_h = 0.0;
    std::size_t dof_cap = kDefaultDofCap;
    std::string method;
    std::string boundary;
    std::string out_dir;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    double resolution = 1e-5;
    std::string check = "all";
    std::vector<double> alpha;
    std::vector<long> n;
    std::vector<int> sizes;
    bool quadrature = false;
    bool portrait = false;
    int teeth = 400;
    std::vector<int> cores;
    bool overwrite = false;
    bool timestamp = false;

    [[nodiscard]] json to_json() const
    {
        json j{{"command", command}, {"format", format}};
        if (!graph_path.empty()) j["graph"] = graph_path;
        if (!family.empty()) j["family"] = family;
        if (!dirichlet.empty()) j["dirichlet"] = dirichlet;
        if (k) j["k"] = k;
        if (mesh_h > 0.0) j["mesh_h"] = mesh_h;
        j["dof_cap"] = dof_cap;
        if (!method.empty()) j["method"] = method;
        if (!boundary.empty()) j["boundary"] = boundary;
        if (seed) j["seed"] = *seed;
        j["resolution"] = resolution;
        if (command == "bounds") j["check"] = check;
        if (!alpha.empty()) j["alpha"] = alpha;
        if (!n.empty()) j["n"] = n;
        if (!sizes.empty()) j["sizes"] = sizes;
        if (command == "comb-probe") {
            j["quadrature"] = quadrature;
            j["portrait"] = portrait;
            if (portrait) {
                j["teeth"] = teeth;
                j["cores"] = cores;
            }
        }
        return j;
    }
};

/// Every artifact of a run passes through one writer. Without an output
/// directory only primary artifacts are printed to the stream.
class Writer {
public:
    Writer(const RunConfig& cfg, std::ostream& stream) : cfg_(cfg), stream_(stream)
    {
        if (!cfg.out_dir.empty()) {
            dir_ = fs::path(cfg.out_dir);
            std::error_code ec;
            fs::create_directories(*dir_, ec);
            if (ec) throw InputError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
        }
    }

    /// Comment-line header naming the anchor and echoing the configuration.
    [[nodiscard]] std::string csv_header(const std::string& anchor) const
    {
        std::ostringstream h;
        h << "# qg " << cfg_.command << '\n' << "# anchor: " << anchor << '\n' << "# config: " << cfg_.to_json().dump() << '\n';
        if (cfg_.timestamp) h << "# generated: " << now() << '\n';
        return h.str();
    }

    [[nodiscard]] json json_document(const std::string& anchor, json results) const
    {
        json doc{{"anchor", anchor}, {"run_config", cfg_.to_json()}, {"results", std::move(results)}};
        if (cfg_.timestamp) doc["generated"] = now();
        return doc;
    }

    void emit(const std::string& name, const std::string& content, bool primary = true)
    {
        if (!dir_) {
            if (primary) stream_ << content;
            return;
        }
        const fs::path path = *dir_ / name;
        const std::string key = path.lexically_normal().string();
        if (!written_.insert(key).second) throw InputError("output path collision: " + key);
        if (fs::exists(path) && !cfg_.overwrite)
            throw InputError("refusing to overwrite existing file " + key + " (use --overwrite)");
        fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InputError("cannot write " + key);
        f << content;
    }

    /// Two-column (x,y) curve for plotting.
    void curve(const std::string& name, const std::string& anchor, const std::vector<std::pair<double, double>>& xy)
    {
        std::ostringstream s;
        s << csv_header(anchor) << "x,y\n" << std::setprecision(17);
        for (const auto& [x, y] : xy) s << x << ',' << y << '\n';
        emit("plots/" + name, s.str(), false);
    }

    [[nodiscard]] bool json_format() const { return cfg_.format == "json"; }

private:
    static std::string now()
    {
        const std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return buf;
    }

    const RunConfig& cfg_;
    std::ostream& stream_;
    std::optional<fs::path> dir_;
    std::set<std::string> written_;
};

std::vector<SpectrumMethod> parse_methods(const std::string& m)
{
    if (m == "fem") return {SpectrumMethod::fem};
    if (m == "fem-extrapolated") return {SpectrumMethod::fem_extrapolated};
    if (m == "secular") return {SpectrumMethod::secular};
    if (m == "both") return {SpectrumMethod::fem_extrapolated, SpectrumMethod::secular};
    throw InputError("unknown method '" + m + "' (fem, fem-extrapolated, secular, both)");
}

SpectrumMethod single_method(const std::string& m)
{
    const auto ms = parse_methods(m);
    if (ms.size() != 1) throw InputError("this command takes a single method");
    return ms.front();
}

/// Parameters such as alpha print as typed (0.3 rather than 0.29999...).
std::string short_number(double x)
{
    std::ostringstream s;
    s << x;
    return s.str();
}

std::string slug(double x)
{
    std::string out = short_number(x);
    for (char& c : out)
        if (c == '.') c = 'p';
    return out;
}

json read_json_arg(const std::string& text)
{
    try {
        if (!text.empty() && text.front() == '{') return json::parse(text);
        std::ifstream f(text);
        if (!f) throw InputError("cannot open '" + text + "'");
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

QuantumGraph load_input(const RunConfig& cfg)
{
    QuantumGraph q;
    const int sources = !cfg.graph_path.empty() + !cfg.family.empty();
    if (sources > 1) throw InputError("give only one of --graph and --family");
    if (!cfg.graph_path.empty()) {
        q = load_graph_file(cfg.graph_path);
        if (!cfg.boundary.empty()) q.conditions = q.conditions.with_boundary_rule(parse_end_condition(cfg.boundary));
    } else if (!cfg.family.empty()) {
        FamilySpec spec = family_from_json(read_json_arg(cfg.family));
        if (cfg.seed && spec.family == Family::random_compact) spec.seed = cfg.seed;
        if (!cfg.boundary.empty()) spec.end_condition = parse_end_condition(cfg.boundary);
        q = make_family(spec);
    } else if (cfg.seed) {
        q = make_family(random_pool_spec(*cfg.seed));
    } else {
        throw InputError("one of --graph, --family or --seed is required");
    }

    if (!cfg.dirichlet.empty()) {
        if (cfg.dirichlet == "leaves") {
            for (VertexIndex v = 0; v < q.graph.vertex_count(); ++v)
                if (q.graph.degree(v) == 1) q.conditions.dirichlet.insert(v);
        } else {
            std::stringstream ss(cfg.dirichlet);
            std::string id;
            while (std::getline(ss, id, ',')) {
                const auto v = q.graph.find_vertex(id);
                if (!v) throw InputError("unknown vertex '" + id + "' in --dirichlet");
                q.conditions.dirichlet.insert(*v);
            }
        }
        q.conditions.validate(q.graph);
    }
    return q;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, Writer& w)
{
    const QuantumGraph q = load_input(cfg);
    const std::string anchor = "spectrum";
    std::vector<Spectrum> spectra;
    for (SpectrumMethod m : parse_methods(cfg.method)) spectra.push_back(solve_spectrum(q, cfg.k, m, cfg.mesh_h, cfg.dof_cap));

    if (w.json_format()) {
        json arr = json::array();
        for (const auto& s : spectra) {
            json rows = json::array();
            for (std::size_t i = 0; i < s.size(); ++i)
                rows.push_back({{"index", i + 1}, {"eigenvalue", s[i]}, {"multiplicity_group", s.groups[i]},
                                {"residual", s.residuals[i]}});
            arr.push_back({{"method", to_string(s.method)}, {"mesh_h", s.mesh_h}, {"flagged", s.flagged}, {"eigenvalues", rows}});
        }
        w.emit("spectrum.json", w.json_document(anchor, arr).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << w.csv_header(anchor) << "index,eigenvalue,multiplicity_group,method,mesh_h,residual\n" << std::setprecision(17);
        for (const auto& sp : spectra)
            for (std::size_t i = 0; i < sp.size(); ++i)
                s << i + 1 << ',' << sp[i] << ',' << sp.groups[i] << ',' << to_string(sp.method) << ',' << sp.mesh_h << ','
                  << sp.residuals[i] << '\n';
        w.emit("spectrum.csv", s.str());
    }
    for (const auto& sp : spectra) {
        std::vector<std::pair<double, double>> xy;
        for (std::size_t i = 0; i < sp.size(); ++i) xy.emplace_back(static_cast<double>(i + 1), sp[i]);
        w.curve("spectrum_" + to_string(sp.method) + ".csv", anchor, xy);
    }
    return kOk;
}

int cmd_geometry(const RunConfig& cfg, Writer& w)
{
    const QuantumGraph q = load_input(cfg);
    const std::string anchor = "geometry";
    const GeometryReport g = geometry_report(q.graph, q.conditions, cfg.resolution);
    std::vector<std::pair<std::string, double>> rows = {
        {"total_length", g.total_length},
        {"diameter", g.diameter.value},
        {"diameter_error", g.diameter.error},
        {"betti", static_cast<double>(g.betti)},
    };
    if (g.inradius) rows.emplace_back("inradius", *g.inradius);
    const Hypotheses h = hypothesis_check(q);
    if (h.cheeger_constant) rows.emplace_back("cheeger_registered", *h.cheeger_constant);

    // Sweep over the levels of the FEM second eigenfunction (an upper bound
    // for h) and the exact minimum over cuts with at most two points.
    try {
        QuantumGraph standard{q.graph, q.conditions.standard_only()};
        FemSystem sys = assemble(mesh(standard, cfg.mesh_h, cfg.dof_cap));
        Spectrum sp = solve_eigs(sys, 2);
        rows.emplace_back("cheeger_sweep", cheeger_sweep(to_pl_function(sys.mesh, sp.eigenvectors.col(1))));
    } catch (const InputError&) {
    }
    try {
        rows.emplace_back("cheeger_exact_2pt", cheeger_exact_small(q.graph, 2));
    } catch (const InputError&) {
    }

    if (w.json_format()) {
        json r = json::object();
        for (const auto& [k, v] : rows) r[k] = v;
        w.emit("geometry.json", w.json_document(anchor, r).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << w.csv_header(anchor) << "quantity,value\n" << std::setprecision(17);
        for (const auto& [k, v] : rows) s << k << ',' << v << '\n';
        w.emit("geometry.csv", s.str());
    }
    return kOk;
}

int cmd_bounds(const RunConfig& cfg, Writer& w)
{
    const QuantumGraph q = load_input(cfg);
    std::set<std::string> wanted;
    if (cfg.check != "all") {
        std::stringstream ss(cfg.check);
        std::string id;
        while (std::getline(ss, id, ',')) wanted.insert(to_string(parse_bound_id(id)));
    }
    BoundSettings bs;
    bs.count = cfg.k;
    bs.method = single_method(cfg.method);
    bs.mesh_h = cfg.mesh_h;
    bs.dof_cap = cfg.dof_cap;
    bs.resolution = cfg.resolution;
    std::vector<BoundReport> reports;
    for (auto& r : evaluate_bounds(q, bs))
        if (wanted.empty() || wanted.count(r.bound_id)) reports.push_back(std::move(r));

    std::string anchor = "bounds";
    for (const auto& r : reports) anchor += " " + r.bound_id;
    if (w.json_format()) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        w.emit("bounds.json", w.json_document(anchor, arr).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << w.csv_header(anchor);
        write_bounds_csv(s, reports);
        w.emit("bounds.csv", s.str());
    }
    return any_violated(reports) ? kBoundViolated : kOk;
}

int cmd_exhaust(const RunConfig& cfg, Writer& w)
{
    if (cfg.family.empty()) throw InputError("exhaust needs --family (diagonal_comb or geometric_tree)");
    if (cfg.method == "secular" || cfg.method == "both")
        throw InputError("exhaust runs on FEM only; use --method fem or fem-extrapolated");
    FamilySpec spec = family_from_json(read_json_arg(cfg.family));
    if (!cfg.boundary.empty()) spec.end_condition = parse_end_condition(cfg.boundary);
    std::vector<int> sizes = cfg.sizes;
    if (sizes.empty()) sizes = {25, 50, 100, 200, 400};
    const auto ladder = truncation_ladder(spec, sizes);
    StudySettings st;
    st.k_max = cfg.k;
    st.mesh_h = cfg.mesh_h;
    st.dof_cap = cfg.dof_cap;
    st.extrapolate = cfg.method != "fem";
    const ConvergenceTable table = convergence_study(ladder, spec.end_condition, st);

    const std::string anchor = "exhaustion-convergence";
    if (w.json_format()) {
        json rows = json::array();
        for (const auto& r : table.rows)
            rows.push_back({{"n", r.n}, {"k", r.k}, {"eigenvalue", r.eigenvalue}, {"method", to_string(r.method)},
                            {"mesh_h", r.mesh_h}, {"boundary_rule", to_string(r.boundary_rule)}});
        json fails = json::array();
        for (const auto& [i, msg] : table.failures) fails.push_back({{"step", i}, {"message", msg}});
        json res{{"rows", rows},
                 {"cauchy_tail", table.cauchy_tail},
                 {"monotonicity_violations", table.monotonicity_violations},
                 {"failures", fails}};
        w.emit("exhaust.json", w.json_document(anchor, res).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << w.csv_header(anchor);
        write_csv(s, table);
        w.emit("exhaust.csv", s.str());
    }
    for (std::size_t k = 1; k <= cfg.k; ++k) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& r : table.rows)
            if (r.k == k) xy.emplace_back(r.n, r.eigenvalue);
        w.curve("exhaust_k" + std::to_string(k) + ".csv", anchor, xy);
    }
    for (const auto& [i, msg] : table.failures)
        if (i >= 0) throw SolverError("step " + std::to_string(i) + ": " + msg);
    return kOk;
}

int cmd_comb_probe(const RunConfig& cfg, Writer& w)
{
    std::vector<double> alphas = cfg.alpha.empty() ? std::vector<double>{0.5} : cfg.alpha;
    std::vector<long> ns = cfg.n.empty() ? std::vector<long>{1000, 10000} : cfg.n;
    const std::string anchor = "comb-phase-transition";
    const double ceiling = comb_probe_ceiling();

    std::ostringstream s;
    json arr = json::array();
    s << w.csv_header(anchor)
      << "alpha,n,rise_start,peak,fall_end,energy,shaft_mass,teeth_mass,mass,rayleigh,ceiling,quadrature\n"
      << std::setprecision(17);
    for (double a : alphas) {
        std::vector<std::pair<double, double>> xy;
        for (long n : ns) {
            if (!(a > 0.0 && a <= 0.5)) {
                // The probe family is only defined for 0 < alpha <= 1/2.
                s << short_number(a) << ',' << n << ",,,,,,,,n/a," << ceiling << ",\n";
                arr.push_back({{"alpha", a}, {"n", n}, {"rayleigh", nullptr}});
                continue;
            }
            const CombProbe p = comb_test_function(a, n);
            std::optional<double> quad;
            if (cfg.quadrature) quad = comb_probe_quadrature(a, n);
            s << short_number(a) << ',' << n << ',' << p.rise_start << ',' << p.peak << ',' << p.fall_end << ',' << p.energy << ','
              << p.shaft_mass << ',' << p.teeth_mass << ',' << p.mass << ',' << p.rayleigh << ',' << ceiling << ',';
            if (quad) s << *quad;
            s << '\n';
            json j{{"alpha", a},         {"n", n},         {"energy", p.energy}, {"shaft_mass", p.shaft_mass},
                   {"teeth_mass", p.teeth_mass}, {"mass", p.mass}, {"rayleigh", p.rayleigh}, {"ceiling", ceiling}};
            if (quad) j["quadrature"] = *quad;
            arr.push_back(j);
            xy.emplace_back(static_cast<double>(n), p.rayleigh);
        }
        if (!xy.empty()) w.curve("rayleigh_alpha" + slug(a) + ".csv", anchor, xy);
    }
    if (w.json_format())
        w.emit("comb_probe.json", w.json_document(anchor, arr).dump(2) + "\n");
    else
        w.emit("comb_probe.csv", s.str());

    if (cfg.portrait) {
        PhasePortraitSettings ps;
        ps.teeth = cfg.teeth;
        if (!cfg.cores.empty()) ps.cores = cfg.cores;
        ps.dof_cap = std::min<std::size_t>(cfg.dof_cap, ps.dof_cap);
        if (!cfg.boundary.empty()) ps.end_condition = parse_end_condition(cfg.boundary);
        const auto rows = phase_portrait(alphas, ns, ps);
        std::ostringstream p;
        p << w.csv_header(anchor) << "alpha,signature,parameter,value\n" << std::setprecision(17);
        std::map<std::pair<double, std::string>, std::vector<std::pair<double, double>>> curves;
        for (const auto& r : rows) {
            p << short_number(r.alpha) << ',' << r.signature << ',' << r.parameter << ',';
            if (r.value) {
                p << *r.value;
                curves[{r.alpha, r.signature}].emplace_back(r.parameter, *r.value);
            } else {
                p << "n/a";
            }
            p << '\n';
        }
        w.emit("phase_portrait.csv", p.str(), false);
        for (const auto& [key, xy] : curves) w.curve("portrait_" + key.second + "_alpha" + slug(key.first) + ".csv", anchor, xy);
    }
    return kOk;
}

int cmd_oracle_compare(const RunConfig& cfg, Writer& w)
{
    const QuantumGraph q = load_input(cfg);
    const Spectrum fem = solve_extrapolated(q, cfg.k, cfg.mesh_h, cfg.dof_cap);
    SecularSettings ss;
    ss.count = cfg.k;
    const Spectrum sec = eigs_by_scan(q, ss);
    const std::string anchor = "oracle-equivalence";

    double worst = 0.0;
    std::ostringstream s;
    json arr = json::array();
    s << w.csv_header(anchor) << "index,fem_extrapolated,secular,relative_difference\n" << std::setprecision(17);
    for (std::size_t i = 0; i < cfg.k; ++i) {
        const double scale = std::max(std::abs(sec[i]), 1.0);
        const double rel = std::abs(fem[i] - sec[i]) / scale;
        worst = std::max(worst, rel);
        s << i + 1 << ',' << fem[i] << ',' << sec[i] << ',' << rel << '\n';
        arr.push_back({{"index", i + 1}, {"fem_extrapolated", fem[i]}, {"secular", sec[i]}, {"relative_difference", rel}});
    }
    if (w.json_format())
        w.emit("oracle_compare.json", w.json_document(anchor, {{"rows", arr}, {"max_relative_difference", worst}}).dump(2) + "\n");
    else
        w.emit("oracle_compare.csv", s.str());
    return kOk;
}

int cmd_equality_suite(const RunConfig& cfg, Writer& w)
{
    BoundSettings bs;
    bs.method = single_method(cfg.method);
    bs.mesh_h = cfg.mesh_h;
    bs.dof_cap = cfg.dof_cap;
    const auto reports = equality_suite(bs);
    const std::string anchor = "equality-cases";
    if (w.json_format()) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        w.emit("equality_suite.json", w.json_document(anchor, arr).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << w.csv_header(anchor);
        write_bounds_csv(s, reports);
        w.emit("equality_suite.csv", s.str());
    }
    return any_violated(reports) ? kBoundViolated : kOk;
}

template <class T>
std::vector<T> split_list(const std::string& text)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) throw InputError("malformed list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Eigenvalue bounds and spectra of quantum graphs", "qg"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    std::string alpha_list, n_list, size_list, core_list;
    std::optional<std::uint64_t> seed;

    auto graph_opts = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "graph JSON file");
        sub->add_option("--family", cfg.family, "family spec as JSON text or file");
        sub->add_option("--seed", seed, "seed of a random pool instance (or of a random_compact family)");
        sub->add_option("--dirichlet", cfg.dirichlet, "comma-separated vertex ids, or 'leaves'");
        sub->add_option("--boundary", cfg.boundary, "condition at truncation boundaries")
            ->check(CLI::IsMember({"dirichlet", "neumann"}));
    };
    auto common = [&](CLI::App* sub, std::size_t k, double h, const std::string& method) {
        cfg.k = k;
        cfg.mesh_h = h;
        cfg.method = method;
        sub->add_option("--k", cfg.k, "number of eigenvalues")->capture_default_str();
        sub->add_option("--mesh-h", cfg.mesh_h, "target mesh width")->capture_default_str();
        sub->add_option("--dof-cap", cfg.dof_cap, "largest number of mesh nodes")->capture_default_str();
        sub->add_option("--method", cfg.method, "fem | fem-extrapolated | secular | both")->capture_default_str();
    };
    auto output_opts = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out_dir, "output directory (default: print to stdout)");
        sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        sub->add_option("--resolution", cfg.resolution, "diameter grid resolution")->capture_default_str();
        sub->add_flag("--overwrite", cfg.overwrite, "replace existing output files");
        sub->add_flag("--timestamp", cfg.timestamp, "stamp headers with the generation time");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues by FEM and/or the secular scan");
    auto* geometry = app.add_subcommand("geometry", "length, diameter, Betti number, inradius");
    auto* bounds = app.add_subcommand("bounds", "check the eigenvalue inequalities");
    auto* exhaust = app.add_subcommand("exhaust", "eigenvalues along nested truncations");
    auto* probe = app.add_subcommand("comb-probe", "test-function Rayleigh quotients on the diagonal comb");
    auto* oracle = app.add_subcommand("oracle-compare", "extrapolated FEM against the secular scan");
    auto* equality = app.add_subcommand("equality-suite", "equality and strictness cases");

    for (auto* sub : {spectrum, geometry, bounds, oracle}) graph_opts(sub);
    for (auto* sub : {spectrum, geometry, bounds, exhaust, probe, oracle, equality}) output_opts(sub);
    common(spectrum, 5, 5e-3, "fem-extrapolated");
    for (auto* sub : {bounds, oracle, equality}) common(sub, 6, 5e-3, "fem-extrapolated");
    common(exhaust, 1, 1e-3, "fem-extrapolated");
    bounds->add_option("--check", cfg.check, "'all' or comma-separated bound ids / letters")->capture_default_str();
    exhaust->add_option("--family", cfg.family, "comb or tree family spec as JSON text or file")->required();
    exhaust->add_option("--boundary", cfg.boundary, "condition at truncation boundaries")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    exhaust->add_option("--sizes", size_list, "comma-separated truncation sizes");
    probe->add_option("--alpha", alpha_list, "comma-separated exponents");
    probe->add_option("--n", n_list, "comma-separated probe indices");
    probe->add_flag("--quadrature", cfg.quadrature, "cross-check by piecewise-linear quadrature on the truncated comb");
    probe->add_flag("--portrait", cfg.portrait, "also write tail indicators and annulus volumes");
    probe->add_option("--teeth", cfg.teeth, "comb truncation for the portrait")->capture_default_str();
    probe->add_option("--cores", core_list, "comma-separated core sizes for the portrait");
    probe->add_option("--dof-cap", cfg.dof_cap, "largest number of mesh nodes")->capture_default_str();
    probe->add_option("--boundary", cfg.boundary, "condition at the truncation boundary")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        cfg.command = chosen->get_name();
        cfg.seed = seed;
        cfg.alpha = split_list<double>(alpha_list);
        cfg.n = split_list<long>(n_list);
        cfg.sizes = split_list<int>(size_list);
        cfg.cores = split_list<int>(core_list);
        // Every subcommand writes into the same fields, so per-command
        // defaults are restored here.
        auto given = [chosen](const char* name) {
            const CLI::Option* opt = chosen->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        if (!given("--k")) cfg.k = cfg.command == "spectrum" ? 5 : (cfg.command == "exhaust" ? 1 : 6);
        if (!given("--mesh-h")) cfg.mesh_h = cfg.command == "exhaust" ? 1e-3 : 5e-3;
        if (cfg.command == "geometry" || cfg.command == "comb-probe") {
            cfg.k = 0;
            if (cfg.command == "comb-probe") cfg.mesh_h = 0.0;
            cfg.method.clear();
        }
        if (cfg.k == 0 && cfg.command != "geometry" && cfg.command != "comb-probe") throw InputError("--k must be positive");

        Writer writer(cfg, out);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg, writer);
        if (cfg.command == "geometry") return cmd_geometry(cfg, writer);
        if (cfg.command == "bounds") return cmd_bounds(cfg, writer);
        if (cfg.command == "exhaust") return cmd_exhaust(cfg, writer);
        if (cfg.command == "comb-probe") return cmd_comb_probe(cfg, writer);
        if (cfg.command == "oracle-compare") return cmd_oracle_compare(cfg, writer);
        if (cfg.command == "equality-suite") return cmd_equality_suite(cfg, writer);
        throw InputError("unknown command");
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const std::out_of_range& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverError;
    }
}

}  // namespace qg::cli
