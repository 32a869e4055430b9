#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qg/families.hpp"
#include "qg/graph.hpp"

namespace qg {

/// Parses and validates a graph document:
/// {"vertices":[{"id":..,"condition":"standard"|"dirichlet","end":null|"neumann"|"dirichlet"}],
///  "edges":[{"id":..,"endpoints":[a,b],"length":..}]}
/// The result is required to be connected.
[[nodiscard]] QuantumGraph build_from_json(const nlohmann::json& doc);
[[nodiscard]] QuantumGraph load_graph_file(const std::string& path);
[[nodiscard]] nlohmann::json to_json(const QuantumGraph& q);

[[nodiscard]] FamilySpec family_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const FamilySpec& spec);

}  // namespace qg
