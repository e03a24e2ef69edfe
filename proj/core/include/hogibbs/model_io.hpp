#pragma once

#include <filesystem>

#include <json.hpp>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

/// Model file format:
///   {"variables": [{"id": 0, "domain_size": 2}, ...],
///    "factors": [{"scope": [0, 1], "table": [...]},
///                {"scope": [...], "builtin": "ising_edge", "params": {"beta": 0.2}}]}
/// Tables are row-major with the last scope variable varying fastest.
nlohmann::json model_to_json(const FactorGraph& graph);
FactorGraph model_from_json(const nlohmann::json& j);

FactorGraph load_model(const std::filesystem::path& path);
void save_model(const FactorGraph& graph, const std::filesystem::path& path);

}  // namespace hogibbs
