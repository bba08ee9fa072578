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

#include "cmfal/database.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cmfal/rng.hpp"

namespace cmfal {

const char* to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::User:     return "user";
    case EntityKind::Business: return "business";
    case EntityKind::Category: return "category";
  }
  return "?";
}

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::R:  return "R";
    case Relation::BC: return "BC";
    case Relation::UC: return "UC";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  if (s == "R") return Relation::R;
  if (s == "BC") return Relation::BC;
  if (s == "UC") return Relation::UC;
  throw DataError("unknown relation name: '" + s + "'");
}

EntityKind kind_from_string(const std::string& s) {
  if (s == "user") return EntityKind::User;
  if (s == "business") return EntityKind::Business;
  if (s == "category") return EntityKind::Category;
  throw DataError("unknown entity kind: '" + s + "'");
}

std::string EntityRegistry::scoped_key(EntityKind kind, std::string_view key) {
  std::string s = to_string(kind);
  s += ':';
  s += key;
  return s;
}

EntityId EntityRegistry::register_entity(EntityKind kind, std::string_view key) {
  const std::string scoped = scoped_key(kind, key);
  auto it = index_.find(scoped);
  if (it != index_.end()) return it->second;
  const EntityId id = static_cast<EntityId>(keys_.size());
  keys_.emplace_back(key);
  kinds_.push_back(kind);
  index_.emplace(scoped, id);
  return id;
}

std::optional<EntityId> EntityRegistry::find(EntityKind kind,
                                             std::string_view key) const {
  auto it = index_.find(scoped_key(kind, key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EntityId> EntityRegistry::of_kind(EntityKind kind) const {
  std::vector<EntityId> out;
  for (EntityId id = 0; id < kinds_.size(); ++id) {
    if (kinds_[id] == kind) out.push_back(id);
  }
  return out;
}

std::size_t EntityRegistry::count_of_kind(EntityKind kind) const {
  return static_cast<std::size_t>(
      std::count(kinds_.begin(), kinds_.end(), kind));
}

void Database::add_triple(const RelationTriple& triple) {
  if (triple.label != 1 && triple.label != -1) {
    throw DataError("triple label must be +1 or -1");
  }
  const auto schema = relation_schema(triple.relation);
  if (registry_.kind_of(triple.first) != schema[0] ||
      registry_.kind_of(triple.second) != schema[1]) {
    throw DataError(std::string("entity kinds do not match schema of relation ") +
                    to_string(triple.relation));
  }
  const TripleKey key{triple.relation, triple.first, triple.second};
  auto it = index_.find(key);
  if (it != index_.end()) {
    if (triples_[it->second].label != triple.label) {
      throw DataError("conflicting duplicate triple for relation " +
                      std::string(to_string(triple.relation)) + " (" +
                      registry_.key_of(triple.first) + ", " +
                      registry_.key_of(triple.second) + ")");
    }
    return;  // identical duplicate: no-op
  }
  index_.emplace(key, triples_.size());
  triples_.push_back(triple);
}

std::optional<std::int8_t> Database::label_of(Relation rel, EntityId first,
                                              EntityId second) const {
  auto it = index_.find(TripleKey{rel, first, second});
  if (it == index_.end()) return std::nullopt;
  return triples_[it->second].label;
}

std::vector<RelationTriple> Database::triples_matching(
    const RelationMask& mask) const {
  std::vector<RelationTriple> out;
  for (const auto& t : triples_) {
    if (mask.contains(t.relation)) out.push_back(t);
  }
  return out;
}

std::int8_t binarize_rating(int stars) {
  if (stars < 1 || stars > 5) {
    throw DataError("rating must be in 1..5, got " + std::to_string(stars));
  }
  return stars >= 4 ? std::int8_t{1} : std::int8_t{-1};
}

std::vector<RelationTriple> build_user_categories(
    const EntityRegistry& registry, const std::vector<RelationTriple>& ratings,
    const std::vector<RelationTriple>& business_categories, std::uint64_t seed) {
  // categories per business
  std::unordered_map<EntityId, std::vector<EntityId>> cats_of_business;
  for (const auto& t : business_categories) {
    cats_of_business[t.first].push_back(t.second);
  }
  // observed categories per user, in rating order (any rating counts as a visit)
  std::map<EntityId, std::set<EntityId>> observed;
  for (const auto& t : ratings) {
    auto it = cats_of_business.find(t.first);
    if (it == cats_of_business.end()) continue;
    for (EntityId c : it->second) observed[t.second].insert(c);
  }

  const std::vector<EntityId> all_categories = registry.of_kind(EntityKind::Category);
  std::vector<RelationTriple> out;
  for (const auto& [user, pos] : observed) {
    for (EntityId c : pos) {
      out.push_back({Relation::UC, user, c, 1});
    }
    std::vector<EntityId> unobserved;
    for (EntityId c : all_categories) {
      if (!pos.contains(c)) unobserved.push_back(c);
    }
    const std::size_t want = std::min(pos.size(), unobserved.size());
    Rng rng(mix_seed(seed, 0x5543u /* "UC" */, user));
    const auto picked = rng.sample_without_replacement(unobserved.size(), want);
    std::vector<EntityId> negs;
    negs.reserve(want);
    for (std::size_t i : picked) negs.push_back(unobserved[i]);
    std::sort(negs.begin(), negs.end());
    for (EntityId c : negs) {
      out.push_back({Relation::UC, user, c, -1});
    }
  }
  return out;
}

}  // namespace cmfal
