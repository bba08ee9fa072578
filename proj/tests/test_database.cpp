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

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cmfal/database.hpp"

using namespace cmfal;

TEST_CASE("register_entity is idempotent with dense kind-scoped ids") {
  EntityRegistry reg;
  CHECK(reg.register_entity(EntityKind::User, "u-17") == 0);
  CHECK(reg.register_entity(EntityKind::User, "u-17") == 0);
  CHECK(reg.register_entity(EntityKind::Business, "b-1") == 1);
  // the same external key under another kind is a distinct entity
  CHECK(reg.register_entity(EntityKind::Business, "u-17") == 2);
  CHECK(reg.size() == 3);
  CHECK(reg.kind_of(0) == EntityKind::User);
  CHECK(reg.key_of(2) == "u-17");
  CHECK(reg.find(EntityKind::User, "u-17") == EntityId{0});
  CHECK(!reg.find(EntityKind::Category, "u-17").has_value());
}

TEST_CASE("duplicate triples: identical is a no-op, conflicting label throws") {
  Database db;
  const EntityId b = db.registry().register_entity(EntityKind::Business, "b");
  const EntityId u = db.registry().register_entity(EntityKind::User, "u");
  db.add_triple({Relation::R, b, u, 1});
  db.add_triple({Relation::R, b, u, 1});
  CHECK(db.size() == 1);
  CHECK_THROWS_AS(db.add_triple({Relation::R, b, u, -1}), DataError);
  CHECK(db.label_of(Relation::R, b, u) == 1);
  CHECK(!db.label_of(Relation::UC, u, b).has_value());
}

TEST_CASE("relation schema is enforced on insert") {
  Database db;
  const EntityId b = db.registry().register_entity(EntityKind::Business, "b");
  const EntityId u = db.registry().register_entity(EntityKind::User, "u");
  CHECK_THROWS_AS(db.add_triple({Relation::R, u, b, 1}), DataError);  // swapped kinds
  CHECK_THROWS_AS(db.add_triple({Relation::BC, b, u, 1}), DataError);
  CHECK_THROWS_AS(db.add_triple({Relation::R, b, u, 0}), DataError);
}

TEST_CASE("binarize_rating thresholds at 4 stars") {
  CHECK(binarize_rating(4) == 1);
  CHECK(binarize_rating(5) == 1);
  CHECK(binarize_rating(3) == -1);
  CHECK(binarize_rating(2) == -1);
  CHECK(binarize_rating(1) == -1);
  CHECK_THROWS_AS(binarize_rating(0), DataError);
  CHECK_THROWS_AS(binarize_rating(6), DataError);
}

namespace {

struct UcFixture {
  Database db;
  std::vector<RelationTriple> ratings;
  std::vector<RelationTriple> bc;
  std::vector<EntityId> users, businesses, categories;
};

UcFixture make_uc_fixture(int n_users, int n_businesses, int n_categories) {
  UcFixture f;
  auto& reg = f.db.registry();
  for (int i = 0; i < n_users; ++i) {
    f.users.push_back(reg.register_entity(EntityKind::User, "u" + std::to_string(i)));
  }
  for (int i = 0; i < n_businesses; ++i) {
    f.businesses.push_back(
        reg.register_entity(EntityKind::Business, "b" + std::to_string(i)));
  }
  for (int i = 0; i < n_categories; ++i) {
    f.categories.push_back(
        reg.register_entity(EntityKind::Category, "c" + std::to_string(i)));
  }
  return f;
}

}  // namespace

TEST_CASE("build_user_categories emits positives for visited categories") {
  auto f = make_uc_fixture(1, 1, 30);
  // u rated b (negatively - a visit is a visit); b has category c0
  f.ratings.push_back({Relation::R, f.businesses[0], f.users[0], -1});
  f.bc.push_back({Relation::BC, f.businesses[0], f.categories[0], 1});
  const auto uc = build_user_categories(f.db.registry(), f.ratings, f.bc, 7);

  REQUIRE(uc.size() == 2);  // one positive, one sampled negative
  CHECK(uc[0].relation == Relation::UC);
  CHECK(uc[0].first == f.users[0]);
  CHECK(uc[0].second == f.categories[0]);
  CHECK(uc[0].label == 1);
  CHECK(uc[1].label == -1);
  CHECK(uc[1].second != f.categories[0]);
}

TEST_CASE("build_user_categories balances negatives per user") {
  auto f = make_uc_fixture(1, 3, 33);
  for (int i = 0; i < 3; ++i) {
    f.ratings.push_back({Relation::R, f.businesses[i], f.users[0], 1});
    f.bc.push_back({Relation::BC, f.businesses[i], f.categories[i], 1});
  }
  const auto uc = build_user_categories(f.db.registry(), f.ratings, f.bc, 11);
  int pos = 0, neg = 0;
  std::set<EntityId> negs;
  for (const auto& t : uc) {
    (t.label > 0 ? pos : neg) += 1;
    if (t.label < 0) negs.insert(t.second);
  }
  CHECK(pos == 3);
  CHECK(neg == 3);           // #negatives == #positives
  CHECK(negs.size() == 3);   // sampled without replacement
}

TEST_CASE("build_user_categories caps negatives at the unobserved count") {
  auto f = make_uc_fixture(1, 4, 5);
  for (int i = 0; i < 4; ++i) {
    f.ratings.push_back({Relation::R, f.businesses[i], f.users[0], 1});
    f.bc.push_back({Relation::BC, f.businesses[i], f.categories[i], 1});
  }
  // 4 positives but only 1 unobserved category remains
  const auto uc = build_user_categories(f.db.registry(), f.ratings, f.bc, 3);
  int neg = 0;
  for (const auto& t : uc) neg += t.label < 0;
  CHECK(neg == 1);
}

TEST_CASE("build_user_categories is deterministic in the seed") {
  auto f = make_uc_fixture(5, 10, 20);
  for (int u = 0; u < 5; ++u) {
    for (int b = u; b < 10; b += 2) {
      f.ratings.push_back({Relation::R, f.businesses[b], f.users[u], 1});
    }
  }
  for (int b = 0; b < 10; ++b) {
    f.bc.push_back({Relation::BC, f.businesses[b], f.categories[b % 7], 1});
    f.bc.push_back({Relation::BC, f.businesses[b], f.categories[7 + b % 5], 1});
  }
  const auto a = build_user_categories(f.db.registry(), f.ratings, f.bc, 99);
  const auto b = build_user_categories(f.db.registry(), f.ratings, f.bc, 99);
  const auto c = build_user_categories(f.db.registry(), f.ratings, f.bc, 100);
  CHECK(a == b);
  CHECK(a != c);
}
