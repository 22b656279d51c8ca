#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "logpair/moment.hpp"

namespace logpair {

// JSON layout for a CycleConfig:
// {
//   "schemaVersion": 1,
//   "ambientDim": 6,
//   "lambda": 0.5,
//   "curve": [{"type": "point", "i": 0},
//             {"type": "line", "i": 0, "j": 4},
//             {"type": "rnc", "indices": [0,1,2], "weights": [1.0,1.0,1.0]}],
//   "divisor": [0, 1]
// }
// Doubles round-trip bit-exactly; unknown keys are rejected.

namespace detail {

inline void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline nlohmann::json cycle_config_to_json(const CycleConfig& cfg) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["ambientDim"] = cfg.n;
  j["lambda"] = cfg.lambda;
  j["curve"] = nlohmann::json::array();
  for (const auto& comp : cfg.curve) {
    nlohmann::json c;
    if (const auto* p = std::get_if<PointComp>(&comp)) {
      c["type"] = "point";
      c["i"] = p->i;
    } else if (const auto* l = std::get_if<LineComp>(&comp)) {
      c["type"] = "line";
      c["i"] = l->i;
      c["j"] = l->j;
    } else {
      const auto& r = std::get<RncComp>(comp);
      c["type"] = "rnc";
      c["indices"] = r.indices;
      c["weights"] = r.weights;
    }
    j["curve"].push_back(c);
  }
  j["divisor"] = nlohmann::json::array();
  for (const auto& p : cfg.divisor) j["divisor"].push_back(p.i);
  return j;
}

inline CycleConfig cycle_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"schemaVersion", "ambientDim", "lambda", "curve", "divisor"}, "root");
  if (j.at("schemaVersion").get<int>() != 1)
    throw std::invalid_argument("config: unsupported schemaVersion");
  CycleConfig cfg;
  cfg.n = j.at("ambientDim").get<int>();
  cfg.lambda = j.at("lambda").get<double>();
  for (const auto& c : j.at("curve")) {
    const std::string type = c.at("type").get<std::string>();
    if (type == "point") {
      detail::require_keys(c, {"type", "i"}, "point component");
      cfg.curve.push_back(PointComp{c.at("i").get<int>()});
    } else if (type == "line") {
      detail::require_keys(c, {"type", "i", "j"}, "line component");
      cfg.curve.push_back(LineComp{c.at("i").get<int>(), c.at("j").get<int>()});
    } else if (type == "rnc") {
      detail::require_keys(c, {"type", "indices", "weights"}, "rnc component");
      RncComp r;
      r.indices = c.at("indices").get<std::vector<int>>();
      r.weights = c.at("weights").get<std::vector<double>>();
      cfg.curve.push_back(r);
    } else {
      throw std::invalid_argument("config: unknown component type '" + type + "'");
    }
  }
  for (const auto& i : j.at("divisor")) cfg.divisor.push_back(PointComp{i.get<int>()});
  validate_config(cfg);
  return cfg;
}

inline CycleConfig load_cycle_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return cycle_config_from_json(j);
}

inline void save_cycle_config(const CycleConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("config: cannot write " + path);
  out << cycle_config_to_json(cfg).dump(2) << "\n";
}

}  // namespace logpair
