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

#include "cmfal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cmfal/model.hpp"

namespace cmfal {

namespace {
constexpr std::uint64_t kFactorStreamTag = 0x50484921;  // factor draws
constexpr std::uint64_t kLabelStreamTag = 0x4C424C21;   // label draws

std::string padded_key(char prefix, int index, int count) {
  int width = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++width;
  width = std::clamp(width, 4, 9);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, index);
  return buf;
}
}  // namespace

void SyntheticConfig::validate() const {
  if (n_users <= 0 || n_businesses <= 0 || n_categories <= 0) {
    throw ConfigError("synthetic sizes must be positive");
  }
  if (k <= 0) throw ConfigError("synthetic k must be positive");
  if (var < 0.0) throw ConfigError("synthetic var must be >= 0");
}

std::int8_t sample_label(Rng& rng, double score) {
  return rng.uniform01() < sigmoid(score) ? std::int8_t{1} : std::int8_t{-1};
}

SyntheticData generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SyntheticData out;
  auto& reg = out.db.registry();
  std::vector<EntityId> users, businesses, categories;
  for (int i = 0; i < cfg.n_users; ++i) {
    users.push_back(reg.register_entity(EntityKind::User, padded_key('u', i, cfg.n_users)));
  }
  for (int i = 0; i < cfg.n_businesses; ++i) {
    businesses.push_back(
        reg.register_entity(EntityKind::Business, padded_key('b', i, cfg.n_businesses)));
  }
  for (int i = 0; i < cfg.n_categories; ++i) {
    categories.push_back(
        reg.register_entity(EntityKind::Category, padded_key('c', i, cfg.n_categories)));
  }

  out.ground_truth = LatentMatrix::gaussian_init(
      cfg.k, reg.size(), cfg.mean, std::sqrt(cfg.var),
      mix_seed(seed, kFactorStreamTag));

  Rng label_rng(mix_seed(seed, kLabelStreamTag));
  const auto& phi = out.ground_truth;
  for (EntityId b : businesses) {
    for (EntityId u : users) {
      out.db.add_triple({Relation::R, b, u, sample_label(label_rng, phi.dot(b, u))});
    }
  }
  for (EntityId b : businesses) {
    for (EntityId c : categories) {
      out.db.add_triple({Relation::BC, b, c, sample_label(label_rng, phi.dot(b, c))});
    }
  }
  for (EntityId u : users) {
    for (EntityId c : categories) {
      out.db.add_triple({Relation::UC, u, c, sample_label(label_rng, phi.dot(u, c))});
    }
  }
  return out;
}

}  // namespace cmfal
