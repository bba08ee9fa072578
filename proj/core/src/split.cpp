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

#include "cmfal/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cmfal/rng.hpp"

namespace cmfal {

namespace {

constexpr std::uint64_t kSplitStreamTag = 0x53504C54;  // per-user shuffle
constexpr std::uint64_t kColdStreamTag = 0x434F4C44;   // cold-user choice

/// R triples belong to their second entity (the user), UC to their first.
EntityId user_of(const RelationTriple& t) {
  return t.relation == Relation::R ? t.second : t.first;
}

/// Masked R/UC triple indices grouped by user, in EntityId order.
std::map<EntityId, std::vector<std::size_t>> triples_by_user(
    const Database& db, const RelationMask& mask) {
  std::map<EntityId, std::vector<std::size_t>> by_user;
  const auto& triples = db.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    if (t.relation == Relation::BC || !mask.contains(t.relation)) continue;
    by_user[user_of(t)].push_back(i);
  }
  return by_user;
}

}  // namespace

Split split_personalized(const Database& db, const RelationMask& mask,
                         double test_frac, double train_frac, std::uint64_t seed) {
  if (test_frac < 0.0 || train_frac < 0.0 || test_frac + train_frac > 1.0) {
    throw ConfigError("split_personalized: fractions must be >= 0 and sum to <= 1");
  }
  Split split;
  const auto& triples = db.triples();
  if (mask.bc) {
    for (const auto& t : triples) {
      if (t.relation == Relation::BC) split.train.push_back(t);
    }
  }
  for (auto& [user, idx] : triples_by_user(db, mask)) {
    if (idx.size() < 3) {
      split.excluded_users.push_back(user);
      continue;
    }
    Rng rng(mix_seed(seed, kSplitStreamTag, user));
    rng.shuffle(idx);
    const std::size_t n = idx.size();
    const auto n_test = static_cast<std::size_t>(std::floor(n * test_frac));
    const auto n_train = static_cast<std::size_t>(std::floor(n * train_frac));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_test) {
        split.test.push_back(triples[idx[i]]);
      } else if (i < n_test + n_train) {
        split.train.push_back(triples[idx[i]]);
      } else {
        split.pool.push_back(triples[idx[i]]);
      }
    }
  }
  return split;
}

Split split_cold_start(const Database& db, const RelationMask& mask,
                       double cold_frac, std::uint64_t seed) {
  if (cold_frac <= 0.0 || cold_frac >= 1.0) {
    throw ConfigError("split_cold_start: cold_frac must be in (0, 1)");
  }
  const auto by_user = triples_by_user(db, mask);
  std::vector<EntityId> users;
  users.reserve(by_user.size());
  for (const auto& [user, _] : by_user) users.push_back(user);

  const auto n_cold = static_cast<std::size_t>(std::floor(users.size() * cold_frac));
  Rng cold_rng(mix_seed(seed, kColdStreamTag));
  const auto picked = cold_rng.sample_without_replacement(users.size(), n_cold);

  Split split;
  for (std::size_t i : picked) split.cold_users.push_back(users[i]);
  std::sort(split.cold_users.begin(), split.cold_users.end());

  const auto& triples = db.triples();
  if (mask.bc) {
    for (const auto& t : triples) {
      if (t.relation == Relation::BC) split.train.push_back(t);
    }
  }
  for (const auto& [user, idx_const] : by_user) {
    const bool is_cold = std::binary_search(split.cold_users.begin(),
                                            split.cold_users.end(), user);
    if (!is_cold) {
      for (std::size_t i : idx_const) split.train.push_back(triples[i]);
      continue;
    }
    auto idx = idx_const;
    Rng rng(mix_seed(seed, kSplitStreamTag, user));
    rng.shuffle(idx);
    const std::size_t n_test = idx.size() / 2;  // remainder goes to the pool
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_test ? split.test : split.pool).push_back(triples[idx[i]]);
    }
  }
  return split;
}

}  // namespace cmfal
