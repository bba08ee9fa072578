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

#ifndef CMFAL_DATABASE_HPP
#define CMFAL_DATABASE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmfal/types.hpp"

namespace cmfal {

/// Registry of (kind, external key) -> dense EntityId. Registration is
/// idempotent; ids are assigned in first-seen order.
class EntityRegistry {
 public:
  EntityId register_entity(EntityKind kind, std::string_view external_key);
  std::optional<EntityId> find(EntityKind kind, std::string_view external_key) const;

  EntityKind kind_of(EntityId id) const { return kinds_.at(id); }
  const std::string& key_of(EntityId id) const { return keys_.at(id); }
  std::size_t size() const { return keys_.size(); }

  std::vector<EntityId> of_kind(EntityKind kind) const;
  std::size_t count_of_kind(EntityKind kind) const;

 private:
  static std::string scoped_key(EntityKind kind, std::string_view external_key);

  std::vector<std::string> keys_;
  std::vector<EntityKind> kinds_;
  std::unordered_map<std::string, EntityId> index_;
};

/// The relational store: an entity registry plus an append-only list of
/// observed triples with a uniqueness index on (relation, first, second).
///
/// Construction is single-writer; afterwards the store is treated as
/// immutable and may be read from any number of threads.
class Database {
 public:
  EntityRegistry& registry() { return registry_; }
  const EntityRegistry& registry() const { return registry_; }

  /// Inserts a triple. Entity kinds must match the relation schema.
  /// Re-inserting an identical triple is a no-op; the same key pair with a
  /// conflicting label is a DataError.
  void add_triple(const RelationTriple& triple);

  std::optional<std::int8_t> label_of(Relation rel, EntityId first,
                                      EntityId second) const;

  const std::vector<RelationTriple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }

  std::vector<RelationTriple> triples_matching(const RelationMask& mask) const;

 private:
  struct TripleKey {
    Relation relation;
    EntityId first;
    EntityId second;
    bool operator==(const TripleKey&) const = default;
  };
  struct TripleKeyHash {
    std::size_t operator()(const TripleKey& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.relation);
      h = h * 0x100000001B3ULL ^ k.first;
      h = h * 0x100000001B3ULL ^ k.second;
      return static_cast<std::size_t>(h);
    }
  };

  EntityRegistry registry_;
  std::vector<RelationTriple> triples_;
  std::unordered_map<TripleKey, std::size_t, TripleKeyHash> index_;
};

/// Maps 1..5 stars to the binary label: >= 4 is +1, otherwise -1.
/// Out-of-range stars raise DataError.
std::int8_t binarize_rating(int stars);

/// Derives the UC relation from ratings and business categories: every
/// category of a business the user rated becomes a positive, then the same
/// number of negatives is sampled uniformly without replacement from the
/// user's unobserved categories (fewer if the pool runs out).
/// Deterministic given the seed.
std::vector<RelationTriple> build_user_categories(
    const EntityRegistry& registry, const std::vector<RelationTriple>& ratings,
    const std::vector<RelationTriple>& business_categories, std::uint64_t seed);

}  // namespace cmfal

#endif  // CMFAL_DATABASE_HPP
