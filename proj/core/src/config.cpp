// Copyright 2026 The cmfal Authors
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

#include "cmfal/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cmfal {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      // synthetic generator
      "n_users", "n_businesses", "n_categories", "mean", "var",
      // model
      "k", "lambda", "eta", "epochs", "b_max",
      // experiment
      "relations", "iterations", "questions_per_round", "user_fraction",
      "mc_trials", "master_seed", "test_frac", "train_frac", "cold_frac",
      "selectors", "full_retrain_every", "threads",
      // ingestion
      "min_user_ratings", "min_category_businesses",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
  ConfigMap cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (cfg.values_.contains(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number from '" +
                      it->second + "'");
  }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer from '" +
                      it->second + "'");
  }
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer from '" +
                      it->second + "'");
  }
}

void ConfigMap::reject_unknown_keys() const {
  std::string unknown;
  for (const auto& [key, _] : values_) {
    if (!known_keys().contains(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw ConfigError(origin_ + ": unknown config keys: " + unknown);
  }
}

SyntheticConfig synthetic_config_from(const ConfigMap& cfg) {
  SyntheticConfig out;
  out.n_users = cfg.get_int("n_users", out.n_users);
  out.n_businesses = cfg.get_int("n_businesses", out.n_businesses);
  out.n_categories = cfg.get_int("n_categories", out.n_categories);
  out.k = cfg.get_int("k", out.k);
  out.mean = cfg.get_double("mean", out.mean);
  out.var = cfg.get_double("var", out.var);
  out.validate();
  return out;
}

Hyperparams hyperparams_from(const ConfigMap& cfg) {
  Hyperparams hp;
  hp.lambda = cfg.get_double("lambda", hp.lambda);
  hp.eta = cfg.get_double("eta", hp.eta);
  hp.epochs = cfg.get_int("epochs", hp.epochs);
  hp.k = cfg.get_int("k", hp.k);
  hp.b_max = cfg.get_double("b_max", hp.b_max);
  hp.validate();
  return hp;
}

namespace {

RelationMask relations_from(const std::string& value) {
  RelationMask mask{false, false, false};
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const Relation rel = relation_from_string(item);
    if (rel == Relation::R) mask.r = true;
    if (rel == Relation::BC) mask.bc = true;
    if (rel == Relation::UC) mask.uc = true;
  }
  if (!mask.r) throw ConfigError("relations must include R");
  return mask;
}

std::vector<SelectorKind> selectors_from(const std::string& value) {
  std::vector<SelectorKind> out;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(selector_from_name(item));
  }
  if (out.empty()) throw ConfigError("selectors list is empty");
  return out;
}

}  // namespace

ExperimentConfig experiment_config_from(const ConfigMap& cfg) {
  ExperimentConfig out;
  out.hp = hyperparams_from(cfg);
  if (cfg.has("relations")) {
    out.relations = relations_from(cfg.get_string("relations", ""));
  }
  out.iterations = cfg.get_int("iterations", out.iterations);
  out.questions_per_round = cfg.get_int("questions_per_round", out.questions_per_round);
  out.user_fraction = cfg.get_double("user_fraction", out.user_fraction);
  out.mc_trials = cfg.get_int("mc_trials", out.mc_trials);
  out.master_seed = cfg.get_u64("master_seed", out.master_seed);
  out.test_frac = cfg.get_double("test_frac", out.test_frac);
  out.train_frac = cfg.get_double("train_frac", out.train_frac);
  out.cold_frac = cfg.get_double("cold_frac", out.cold_frac);
  if (cfg.has("selectors")) {
    out.selectors = selectors_from(cfg.get_string("selectors", ""));
  }
  out.full_retrain_every = cfg.get_int("full_retrain_every", out.full_retrain_every);
  out.threads = cfg.get_int("threads", out.threads);
  out.validate();
  return out;
}

}  // namespace cmfal
