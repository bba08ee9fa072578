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

#ifndef CMFAL_SPLIT_HPP
#define CMFAL_SPLIT_HPP

#include <cstdint>
#include <vector>

#include "cmfal/database.hpp"
#include "cmfal/types.hpp"

namespace cmfal {

/// Train / test / pool partition of the triples selected for splitting.
/// BC triples are fully observed and always land in train; they are never
/// question candidates.
struct Split {
  std::vector<RelationTriple> train;
  std::vector<RelationTriple> test;
  std::vector<RelationTriple> pool;
  std::vector<EntityId> cold_users;
  std::vector<EntityId> excluded_users;  ///< users dropped for having < 3 triples
};

/// Per user, the R and UC triples under the mask are shuffled and cut
/// test_frac / train_frac / remainder-to-pool (counts floored, remainder to
/// the pool). Users with fewer than 3 triples are excluded and reported.
/// Deterministic given the seed.
Split split_personalized(const Database& db, const RelationMask& mask,
                         double test_frac, double train_frac, std::uint64_t seed);

/// floor(cold_frac * #users) cold users drawn uniformly. Their triples are
/// split half to test, half to pool; every other user's triples go to
/// train, so train never touches a cold user.
Split split_cold_start(const Database& db, const RelationMask& mask,
                       double cold_frac, std::uint64_t seed);

}  // namespace cmfal

#endif  // CMFAL_SPLIT_HPP
