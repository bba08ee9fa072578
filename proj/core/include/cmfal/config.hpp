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

#ifndef CMFAL_CONFIG_HPP
#define CMFAL_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>

#include "cmfal/experiment.hpp"
#include "cmfal/synthetic.hpp"

namespace cmfal {

/// Flat key=value configuration ('#' starts a comment, blank lines are
/// skipped). Unknown keys are hard errors so typos cannot silently fall
/// back to defaults.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::filesystem::path& path);
  static ConfigMap parse_string(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return values_.contains(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// ConfigError naming every key outside the known schema.
  void reject_unknown_keys() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

SyntheticConfig synthetic_config_from(const ConfigMap& cfg);
Hyperparams hyperparams_from(const ConfigMap& cfg);
ExperimentConfig experiment_config_from(const ConfigMap& cfg);

}  // namespace cmfal

#endif  // CMFAL_CONFIG_HPP
