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

#ifndef CMFAL_TYPES_HPP
#define CMFAL_TYPES_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmfal {

/// Dense index into the entity registry. Stable for the life of a store.
using EntityId = std::uint32_t;

enum class EntityKind : std::uint8_t { User = 0, Business = 1, Category = 2 };

/// The three relations of the store schema:
///   R  : Business x User   (binarized ratings)
///   BC : Business x Category
///   UC : User x Category
enum class Relation : std::uint8_t { R = 0, BC = 1, UC = 2 };

constexpr std::array<EntityKind, 2> relation_schema(Relation r) {
  switch (r) {
    case Relation::R:  return {EntityKind::Business, EntityKind::User};
    case Relation::BC: return {EntityKind::Business, EntityKind::Category};
    case Relation::UC: return {EntityKind::User, EntityKind::Category};
  }
  return {EntityKind::User, EntityKind::User};  // unreachable
}

const char* to_string(EntityKind kind);
const char* to_string(Relation rel);
Relation relation_from_string(const std::string& s);
EntityKind kind_from_string(const std::string& s);

/// One observed tuple {relation, first, second, label}. Entity kinds must
/// match the relation schema; labels are +1 / -1.
struct RelationTriple {
  Relation relation;
  EntityId first;
  EntityId second;
  std::int8_t label;

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

/// Which relations participate in a run. R-only reproduces plain matrix
/// factorization; all three give the collective model.
struct RelationMask {
  bool r = true;
  bool bc = true;
  bool uc = true;

  bool contains(Relation rel) const {
    switch (rel) {
      case Relation::R:  return r;
      case Relation::BC: return bc;
      case Relation::UC: return uc;
    }
    return false;
  }
  static RelationMask r_only() { return {true, false, false}; }
  static RelationMask all() { return {true, true, true}; }
};

// Error taxonomy, mapped onto CLI exit codes (2/3/4).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmfal

#endif  // CMFAL_TYPES_HPP
