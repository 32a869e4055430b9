#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qg/fem.hpp"
#include "qg/geometry.hpp"
#include "qg/graph.hpp"
#include "qg/spectrum.hpp"

namespace qg {

// ---------------------------------------------------------------------------
// Hypotheses

struct Hypotheses {
    bool connected = false;
    bool finite_length = true;       ///< always true for the compact graphs handled here
    bool is_tree = false;            ///< connected with beta = 0
    bool doubly_connected = false;   ///< bridgeless, loops included
    bool has_dirichlet = false;
    bool dirichlet_bridgeless = false;     ///< Dirichlet set nonempty and the graph with it merged to one vertex is bridgeless
    bool centred = false;            ///< some vertex equidistant (to 1e-9) from the whole Dirichlet set
    bool leaves_dirichlet = false;   ///< tree whose Dirichlet set is exactly its degree-one vertices
    bool centred_leaf_set = false;   ///< tree with a centre c whose Dirichlet set is the leaves other than c
    std::optional<double> cheeger_constant;  ///< registered closed form: interval 2/L, loop 4/L, equilateral k-star 1/(floor(k/2) l)
};

[[nodiscard]] Hypotheses hypothesis_check(const QuantumGraph& q);

/// Number of bridges of the multigraph on `vertex_count` vertices with the
/// given endpoint pairs. Loops and parallel edges are never bridges.
[[nodiscard]] std::size_t bridge_count(std::size_t vertex_count, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

// ---------------------------------------------------------------------------
// Bound reports

enum class Verdict { holds, equality, violated, hypotheses_not_met };

[[nodiscard]] std::string to_string(Verdict v);

/// Identifiers of the checked inequalities. Each identifier carries the
/// letter used throughout the reports and a short descriptive tag.
enum class BoundId {
    length_kth,            ///< a: mu_k >= pi^2 k^2 / (4 L^2), k >= 2
    length_dirichlet,      ///< b: lambda_1 >= pi^2 / (4 L^2)
    doubly_connected_gap,  ///< c: mu_2 >= 4 pi^2 / L^2
    two_path_dirichlet,    ///< d: lambda_1 >= pi^2 / L^2
    length_diameter_lower, ///< e: mu_2 >= 2 / (L D)
    tree_diameter,         ///< f: lambda_1 >= pi^2 / D^2
    centred_inradius,      ///< g: lambda_1 >= pi^2 / (4 Inr^2)
    cheeger,               ///< h: mu_2 >= h^2 / 4
    length_diameter_upper, ///< i: mu_2 <= pi^2 (4 L - 3 D) / D^3
    betti_diameter_upper,  ///< j: mu_k <= (k + beta - 1)^2 pi^2 / D^2, k >= 2
};

inline constexpr BoundId kAllBounds[] = {
    BoundId::length_kth,           BoundId::length_dirichlet,      BoundId::doubly_connected_gap,
    BoundId::two_path_dirichlet,   BoundId::length_diameter_lower, BoundId::tree_diameter,
    BoundId::centred_inradius,     BoundId::cheeger,               BoundId::length_diameter_upper,
    BoundId::betti_diameter_upper,
};

/// "a:length-kth", "b:length-dirichlet", ...
[[nodiscard]] std::string to_string(BoundId id);
/// Accepts the full tag or the single letter.
[[nodiscard]] BoundId parse_bound_id(const std::string& s);
/// Human-readable form of the inequality.
[[nodiscard]] std::string statement(BoundId id);

struct BoundReport {
    std::string bound_id;
    std::string statement;
    bool upper = false;             ///< eigenvalue <= bound rather than >=
    std::size_t k = 0;              ///< eigenvalue index used (1-based), 0 when not evaluated
    std::vector<std::pair<std::string, bool>> hypotheses;
    double bound_value = 0.0;       ///< taken at the end of the geometry error bar most favourable to the bound
    double eigenvalue = 0.0;
    double eigen_tol = 0.0;         ///< absolute
    double geometry_tol = 0.0;      ///< spread of the bound over the geometry error bar
    double margin = 0.0;            ///< signed slack, negative when the inequality fails at bound_value
    Verdict verdict = Verdict::hypotheses_not_met;
    std::string instance;           ///< optional label of the graph
};

/// Classification shared by every check: violated when margin < -eigen_tol,
/// equality when |margin| <= eigen_tol + geometry_tol, otherwise holds.
[[nodiscard]] Verdict classify(double margin, double eigen_tol, double geometry_tol);

struct BoundInputs {
    /// Spectrum under standard conditions (Dirichlet set dropped); needs
    /// mu_1..mu_k, at least two values.
    std::optional<Spectrum> standard;
    /// Spectrum under the graph's own conditions; needs lambda_1. Required
    /// when the Dirichlet set is nonempty.
    std::optional<Spectrum> mixed;
    std::optional<GeometryReport> geometry;
    double eigen_rel_tol = 1e-6;
};

/// One report per inequality in kAllBounds order. Bounds whose hypotheses
/// fail are reported as hypotheses-not-met without evaluation. For a and j
/// every available k is checked and the report with the smallest relative
/// margin is kept. Throws InputError when a bound with satisfied hypotheses
/// lacks the spectrum or geometry it needs.
[[nodiscard]] std::vector<BoundReport> check_bounds(const QuantumGraph& q, const BoundInputs& in);

struct BoundSettings {
    std::size_t count = 6;          ///< standard eigenvalues computed
    SpectrumMethod method = SpectrumMethod::fem_extrapolated;
    double mesh_h = 5e-3;
    std::size_t dof_cap = kDefaultDofCap;
    double resolution = 1e-5;       ///< diameter grid
    double eigen_rel_tol = 1e-6;
};

/// Any method: plain FEM, extrapolated FEM, or the secular scan.
[[nodiscard]] Spectrum solve_spectrum(const QuantumGraph& q, std::size_t count, SpectrumMethod method, double mesh_h,
                                      std::size_t dof_cap = kDefaultDofCap);

/// Computes the spectra and geometry for `q` and runs check_bounds.
[[nodiscard]] std::vector<BoundReport> evaluate_bounds(const QuantumGraph& q, const BoundSettings& settings = {});

[[nodiscard]] bool any_violated(const std::vector<BoundReport>& reports);

// ---------------------------------------------------------------------------
// Canonical instances and equality cases

struct CanonicalInstance {
    std::string name;
    QuantumGraph graph;
    std::vector<std::string> equality_ids;  ///< every bound expected to be attained
    std::vector<std::string> targets;       ///< bounds reported by equality_suite
};

/// Equality instances: equilateral k-stars (k = 2..5, L = k), the interval
/// with one Dirichlet end, the loop and symmetric necklaces of 2 and 3
/// pumpkins (L = 1), necklaces with a Dirichlet extremity, equilateral
/// Dirichlet-tipped 3- and 4-stars, and the T-shaped star (1, 1, 0.5) with
/// Dirichlet tips.
[[nodiscard]] std::vector<CanonicalInstance> canonical_instances();

/// The letter-T star with arms (1, 1, 0.5) and Dirichlet tips.
[[nodiscard]] QuantumGraph letter_t_graph(double long_arm = 1.0, double short_arm = 0.5);

/// Target reports of every canonical instance, followed by the strictness
/// report for the letter-T graph: lambda_1 <= pi^2 / (4 Inr^2) - 0.5.
[[nodiscard]] std::vector<BoundReport> equality_suite(const BoundSettings& settings = {});

// ---------------------------------------------------------------------------
// Comb probes

/// Test function on the diagonal comb: rising from 0 at a = (2n)^-alpha to 1
/// at p = n^-alpha, falling to 0 at b = 2p - a, constant along each tooth.
struct CombProbe {
    double alpha = 0.0;
    long n = 0;
    double rise_start = 0.0;  ///< a
    double peak = 0.0;        ///< p
    double fall_end = 0.0;    ///< b
    double energy = 0.0;      ///< 2 / (p - a)
    double shaft_mass = 0.0;  ///< 2 (p - a) / 3
    double teeth_mass = 0.0;  ///< sum over teeth rooted in (a, b) of k^-alpha phi(k^-alpha)^2
    long first_tooth = 0;     ///< teeth k in [first_tooth, last_tooth] carry mass
    long last_tooth = 0;
    double mass = 0.0;
    double rayleigh = 0.0;

    [[nodiscard]] double value(double x) const;  ///< profile at shaft position x
};

/// Closed-form probe. Throws InputError unless 0 < alpha <= 1/2, n >= 2 and
/// b <= 1.
[[nodiscard]] CombProbe comb_test_function(double alpha, long n);

/// Rayleigh quotient of the same function assembled as a piecewise-linear
/// function on the comb truncation with 2n + 1 teeth and integrated edge by
/// edge; an independent check of the closed form.
[[nodiscard]] double comb_probe_quadrature(double alpha, long n);

/// 64 / (sqrt 2 - 1).
[[nodiscard]] double comb_probe_ceiling();

struct PhasePortraitSettings {
    int teeth = 400;                       ///< truncation used for tail indicators and annuli
    std::vector<int> cores = {25, 50, 100, 200};
    double mesh_h = 1e-3;
    std::size_t dof_cap = 50'000;
    EndCondition end_condition = EndCondition::neumann;
    int annulus_k_max = 8;
};

struct PhaseRow {
    double alpha = 0.0;
    std::string signature;  ///< "rayleigh", "tail", "annulus"
    double parameter = 0.0; ///< n, core size m, or radius index k
    std::optional<double> value;  ///< empty = not applicable
};

/// The three signatures per alpha: R(phi_n) over `ns` (only for
/// alpha in (0, 1/2]), tail indicators over the core sizes, and annulus
/// volumes about the shaft end at harmonic radii.
[[nodiscard]] std::vector<PhaseRow> phase_portrait(const std::vector<double>& alphas, const std::vector<long>& ns,
                                                   const PhasePortraitSettings& settings = {});

/// Core of a comb truncation: teeth 1..m and the shaft edges between them.
[[nodiscard]] std::vector<bool> comb_core_edges(const QuantumGraph& comb, int m);

// ---------------------------------------------------------------------------
// Surgery checks

struct InterlacingRow {
    std::size_t k = 0;
    double original = 0.0;       ///< mu_k of the graph
    double cut = 0.0;            ///< mu_k after cutting
    double cut_shifted = 0.0;    ///< mu_{k+j} after cutting
    bool lower_ok = false;       ///< mu_k >= mu_k'
    bool upper_ok = false;       ///< mu_k <= mu_{k+j}'
};

struct InterlacingReport {
    int cuts = 0;
    bool disconnected = false;
    std::vector<InterlacingRow> rows;
    double tolerance = 0.0;
    [[nodiscard]] bool holds() const;
};

struct InterlacingSettings {
    std::size_t k_max = 8;
    SpectrumMethod method = SpectrumMethod::fem_extrapolated;
    double mesh_h = 5e-3;
    double rel_tol = 1e-6;
};

/// Compares mu_k of `original` and `cut` (with `cuts` cuts) for k <= k_max.
[[nodiscard]] InterlacingReport surgery_interlacing_check(const QuantumGraph& original, const QuantumGraph& cut, int cuts,
                                                          const InterlacingSettings& settings = {});

struct RandomCut {
    QuantumGraph graph;
    int cuts = 0;
    bool disconnected = false;
};

/// Applies `cuts` seeded vertex cuts, each splitting the edge ends of a
/// vertex of degree >= 2 into two groups. Throws InputError when no vertex
/// of degree >= 2 is left.
[[nodiscard]] RandomCut random_cuts(const QuantumGraph& q, int cuts, std::uint64_t seed);

struct DirichletCutReport {
    double lambda_full = 0.0;
    double lambda_cut = 0.0;
    std::vector<double> derivatives;  ///< of the nonnegative ground state, pointing into the removed edge
    bool sign_hypothesis = false;     ///< every derivative <= tolerance
    bool strict = false;              ///< some derivative clearly negative
    bool skipped = false;             ///< sign hypothesis failed numerically
    bool holds = false;               ///< lambda_full >= lambda_cut (strictly when `strict`)
};

/// Removes `edge` (whose far end must be a Dirichlet leaf) and compares the
/// lowest eigenvalues under the given conditions.
[[nodiscard]] DirichletCutReport dirichlet_cut_check(const QuantumGraph& q, EdgeIndex edge, double mesh_h = 1e-3);

// ---------------------------------------------------------------------------
// Output

[[nodiscard]] nlohmann::json to_json(const BoundReport& r);
void write_bounds_csv(std::ostream& out, const std::vector<BoundReport>& reports);

}  // namespace qg
