// Copyright 2026 The mnlkb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mnlkb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mnlkb/errors.hpp"

namespace mnlkb {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + where + "." + key + "\"");
    }
  }
}

template <typename T>
T get(const json& obj, const std::string& where, const std::string& key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void maybe(const json& obj, const std::string& where, const std::string& key,
           T& out) {
  if (obj.contains(key)) out = get<T>(obj, where, key);
}

Eigen::VectorXd vector_of(const json& obj, const std::string& where,
                          const std::string& key) {
  const auto xs = get<std::vector<double>>(obj, where, key);
  return Eigen::Map<const Eigen::VectorXd>(xs.data(),
                                           static_cast<Eigen::Index>(xs.size()));
}

std::pair<double, double> range_of(const json& obj, const std::string& where,
                                   const std::string& key) {
  const auto xs = get<std::vector<double>>(obj, where, key);
  if (xs.size() != 2) throw ConfigError(where + "." + key + " must be [lo, hi]");
  return {xs[0], xs[1]};
}

Instance parse_instance(const json& obj) {
  const std::string w = "instance";
  reject_unknown(obj, w,
                 {"revenues", "utilities", "inventories", "cardinality_cap",
                  "horizon", "v_max"});
  Instance inst;
  inst.revenues = vector_of(obj, w, "revenues");
  inst.utilities = vector_of(obj, w, "utilities");
  inst.inventories = get<std::vector<std::int64_t>>(obj, w, "inventories");
  inst.cardinality_cap = get<int>(obj, w, "cardinality_cap");
  inst.horizon = get<int>(obj, w, "horizon");
  maybe(obj, w, "v_max", inst.v_max);
  inst.n_products = static_cast<int>(inst.revenues.size());
  return inst;
}

InstanceGenerator parse_generator(const json& obj) {
  const std::string w = "generator";
  reject_unknown(obj, w,
                 {"n_products", "cardinality_cap", "horizon", "v_max",
                  "inventory_fraction", "inventories", "revenues",
                  "revenue_range", "utilities", "utility_range"});
  InstanceGenerator g;
  g.n_products = get<int>(obj, w, "n_products");
  g.cardinality_cap = get<int>(obj, w, "cardinality_cap");
  g.horizon = get<int>(obj, w, "horizon");
  maybe(obj, w, "v_max", g.v_max);
  maybe(obj, w, "inventory_fraction", g.inventory_fraction);
  if (obj.contains("inventories")) {
    g.inventories = get<std::vector<std::int64_t>>(obj, w, "inventories");
  }
  if (obj.contains("revenues")) g.revenues = vector_of(obj, w, "revenues");
  if (obj.contains("utilities")) g.utilities = vector_of(obj, w, "utilities");
  if (obj.contains("revenue_range")) {
    g.revenue_range = range_of(obj, w, "revenue_range");
  }
  if (obj.contains("utility_range")) {
    g.utility_range = range_of(obj, w, "utility_range");
  }
  return g;
}

PolicyEntry parse_policy(const json& obj, std::size_t index) {
  const std::string w = "policies[" + std::to_string(index) + "]";
  PolicyEntry e;
  if (obj.is_string()) {
    e.kind = parse_policy_kind(obj.get<std::string>());
    e.label = obj.get<std::string>();
    return e;
  }
  reject_unknown(obj, w,
                 {"policy", "label", "epsilon_target", "oracle_mode",
                  "eps_oracle", "omega_mode", "omega", "omega_cap", "c_const",
                  "oracle_bounds", "count_multiplier"});
  const auto kind = get<std::string>(obj, w, "policy");
  e.kind = parse_policy_kind(kind);
  e.label = kind;
  maybe(obj, w, "label", e.label);
  auto& c = e.config;
  if (obj.contains("epsilon_target")) {
    c.epsilon_target = get<double>(obj, w, "epsilon_target");
  }
  if (obj.contains("oracle_mode")) {
    c.oracle_mode = parse_oracle_mode(get<std::string>(obj, w, "oracle_mode"));
  }
  maybe(obj, w, "eps_oracle", c.eps_oracle);
  if (obj.contains("omega_mode")) {
    c.omega_mode = parse_omega_mode(get<std::string>(obj, w, "omega_mode"));
  }
  if (obj.contains("omega")) {
    if (c.omega_mode != OmegaMode::kManual) {
      throw ConfigError(w + ".omega requires omega_mode \"manual\"");
    }
    c.omega_manual = get<double>(obj, w, "omega");
  }
  maybe(obj, w, "omega_cap", c.omega_cap);
  maybe(obj, w, "c_const", c.c_const);
  maybe(obj, w, "oracle_bounds", c.oracle_bounds);
  maybe(obj, w, "count_multiplier", c.count_multiplier);
  return e;
}

DiagnosticsToggles parse_diagnostics(const json& obj) {
  const std::string w = "diagnostics";
  reject_unknown(obj, w,
                 {"unbiasedness", "epoch_length", "coverage", "zero_utility",
                  "epochs", "coverage_replications", "assortment"});
  DiagnosticsToggles d;
  maybe(obj, w, "unbiasedness", d.unbiasedness);
  maybe(obj, w, "epoch_length", d.epoch_length);
  maybe(obj, w, "coverage", d.coverage);
  maybe(obj, w, "zero_utility", d.zero_utility);
  maybe(obj, w, "epochs", d.epochs);
  maybe(obj, w, "coverage_replications", d.coverage_replications);
  if (obj.contains("assortment")) {
    auto ids = get<std::vector<int>>(obj, w, "assortment");
    for (int& id : ids) {
      if (id < 1) throw ConfigError(w + ".assortment uses 1-based product ids");
      --id;
    }
    try {
      d.assortment = Assortment(ids);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(w + ".assortment: " + e.what());
    }
  }
  return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "$",
                 {"instance", "generator", "replications", "seed", "policies",
                  "horizons", "diagnostics", "output"});
  ExperimentConfig cfg;
  if (doc.contains("instance")) cfg.instance = parse_instance(doc["instance"]);
  if (doc.contains("generator")) {
    cfg.generator = parse_generator(doc["generator"]);
  }
  maybe(doc, "$", "replications", cfg.replications);
  maybe(doc, "$", "seed", cfg.seed);
  if (doc.contains("policies")) {
    const json& ps = doc["policies"];
    if (!ps.is_array()) throw ConfigError("policies must be an array");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      cfg.policies.push_back(parse_policy(ps[k], k));
    }
  } else {
    cfg.policies.push_back(parse_policy(json("ucb_knapsack"), 0));
  }
  std::set<std::string> labels;
  for (const auto& p : cfg.policies) {
    if (!labels.insert(p.label).second) {
      throw ConfigError("duplicate policy label \"" + p.label + "\"");
    }
  }
  maybe(doc, "$", "horizons", cfg.horizons);
  if (doc.contains("diagnostics")) {
    cfg.diagnostics = parse_diagnostics(doc["diagnostics"]);
  }
  if (doc.contains("output")) {
    reject_unknown(doc["output"], "output", {"epochs_csv"});
    maybe(doc["output"], "output", "epochs_csv", cfg.write_epochs);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace mnlkb
