#include "dnlearn/json_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dnlearn {

using nlohmann::json;

DecisionNetwork dn_from_json(const std::string& text) {
  json j = json::parse(text);
  DecisionNetwork dn;
  if (!j.contains("variables") || !j["variables"].is_array())
    throw std::invalid_argument("decision network JSON lacks a variables array");
  for (const auto& v : j["variables"])
    dn.add_variable(v.at("name").get<std::string>(),
                    kind_from_string(v.at("kind").get<std::string>()));
  const auto& parents = j.value("parents", json::object());
  const auto& cpt = j.value("cpt", json::object());
  for (const auto& v : j["variables"]) {
    std::string name = v.at("name").get<std::string>();
    if (parents.contains(name))
      dn.set_parents(name, parents.at(name).get<std::vector<std::string>>());
    if (cpt.contains(name)) dn.set_cpt(name, cpt.at(name).get<std::vector<double>>());
  }
  dn.set_reward(j.at("reward_domain").get<std::vector<std::string>>(),
                j.at("reward_table").get<std::vector<double>>());
  return dn;
}

std::string dn_to_json(const DecisionNetwork& dn) {
  json j;
  j["variables"] = json::array();
  for (const auto& v : dn.variables())
    j["variables"].push_back({{"name", v.name}, {"kind", to_string(v.kind)}});
  json parents = json::object();
  json cpt = json::object();
  for (const auto& v : dn.variables()) {
    if (v.kind == VariableKind::Action) continue;
    parents[v.name] = dn.parents_of(v.name);
    cpt[v.name] = dn.cpt_of(dn.index_of(v.name));
  }
  j["parents"] = parents;
  j["cpt"] = cpt;
  j["reward_domain"] = dn.reward_domain();
  j["reward_table"] = dn.reward_table();
  return j.dump(2) + "\n";
}

DecisionNetwork load_dn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return dn_from_json(buf.str());
}

void save_dn(const DecisionNetwork& dn, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write network file: " + path);
  out << dn_to_json(dn);
}

}  // namespace dnlearn
