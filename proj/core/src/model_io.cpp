#include "hogibbs/model_io.hpp"

#include <fstream>

#include "hogibbs/errors.hpp"
#include "hogibbs/model_zoo.hpp"

namespace hogibbs {

nlohmann::json model_to_json(const FactorGraph& graph) {
  nlohmann::json j;
  auto& vars = j["variables"] = nlohmann::json::array();
  for (const VariableSpec& v : graph.variables()) {
    vars.push_back({{"id", v.id}, {"domain_size", v.domain_size}});
  }
  auto& factors = j["factors"] = nlohmann::json::array();
  for (const Factor& f : graph.factors()) {
    const FactorDescriptor d = f.function->descriptor();
    nlohmann::json entry{{"scope", f.scope}};
    if (d.builtin.empty()) {
      entry["table"] = d.table;
    } else {
      entry["builtin"] = d.builtin;
      entry["params"] = d.params;
    }
    factors.push_back(std::move(entry));
  }
  return j;
}

FactorGraph model_from_json(const nlohmann::json& j) {
  try {
    std::vector<VariableSpec> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("id").get<VarId>(), v.at("domain_size").get<int>()});
    }
    std::vector<int> domains(vars.size(), 0);
    for (const auto& v : vars) {
      if (v.id >= vars.size()) throw ConfigError("variable ids must be exactly 0..n-1");
      domains[v.id] = v.domain_size;
    }
    std::vector<Factor> factors;
    for (const auto& f : j.at("factors")) {
      Factor factor;
      factor.scope = f.at("scope").get<std::vector<VarId>>();
      std::vector<int> scope_domains;
      for (VarId v : factor.scope) {
        if (v >= domains.size()) throw ConfigError("factor scope references unknown variable");
        scope_domains.push_back(domains[v]);
      }
      if (f.contains("table")) {
        factor.function = std::make_shared<TableFactor>(
            scope_domains, f.at("table").get<std::vector<double>>());
      } else if (f.contains("builtin")) {
        std::map<std::string, double> params;
        if (f.contains("params")) params = f.at("params").get<std::map<std::string, double>>();
        factor.function =
            make_builtin_factor(f.at("builtin").get<std::string>(), scope_domains, params);
      } else {
        throw ConfigError("factor needs either 'table' or 'builtin'");
      }
      factors.push_back(std::move(factor));
    }
    return FactorGraph(std::move(vars), std::move(factors));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model JSON: ") + e.what());
  }
}

FactorGraph load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const FactorGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << model_to_json(graph).dump(2) << '\n';
}

}  // namespace hogibbs
