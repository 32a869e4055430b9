#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qg/graph.hpp"

namespace qg {

enum class Family {
    interval,
    star,
    loop,
    necklace,
    diagonal_comb,
    geometric_tree,
    lasso,
    random_compact,
};

[[nodiscard]] std::string to_string(Family f);
[[nodiscard]] Family parse_family(const std::string& s);

/// Parametric generator description. Only the fields relevant to `family`
/// are read; the rest keep their defaults.
struct FamilySpec {
    Family family = Family::interval;

    double length = 1.0;               // interval, loop, lasso loop
    double tail_length = 0.5;          // lasso tail
    int arms = 3;                      // star
    double arm_length = 1.0;           // star (equilateral)
    std::vector<double> lengths;       // star arms, or necklace parallel pairs
    int pumpkins = 1;                  // necklace
    double edge_length = 0.25;         // necklace (symmetric)
    double alpha = 0.5;                // diagonal comb
    int teeth = 10;                    // diagonal comb truncation
    int branches = 2;                  // geometric tree
    double ratio = 0.5;                // geometric tree length ratio q
    int generations = 3;               // geometric tree truncation
    int vertices = 4;                  // random compact
    int beta = 0;                      // random compact target Betti number
    double length_min = 0.3;
    double length_max = 2.0;
    std::optional<std::uint64_t> seed;
    EndCondition end_condition = EndCondition::neumann;

    void validate() const;
};

/// Builds the family member. Comb and tree truncations carry end tags on
/// their boundary vertices with `spec.end_condition`.
[[nodiscard]] QuantumGraph make_family(const FamilySpec& spec);

/// Closed-form total length of the member built by make_family.
[[nodiscard]] double family_total_length(const FamilySpec& spec);

/// Total length of the untruncated diagonal comb, 1 + zeta(alpha) (alpha > 1).
[[nodiscard]] double comb_limit_length(double alpha);

/// Shaft position of the n-th comb vertex, n^{-alpha}.
[[nodiscard]] double comb_position(double alpha, int n);

/// Spec of the seeded random instance used by the verification pools:
/// beta in {0,1,2}, at most 8 edges, lengths uniform in [0.3, 2].
[[nodiscard]] FamilySpec random_pool_spec(std::uint64_t seed);

/// Reproducible uniform draws on top of mt19937_64; the standard
/// distributions are implementation-defined, these are not.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)); }
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace qg
