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

#include "cmfal/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cmfal {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

int parse_int(const std::string& s, const std::string& what) {
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw DataError("cannot parse " + what + " from '" + s + "'");
  }
  return value;
}

std::int8_t parse_pm_one(const std::string& s) {
  if (s == "1" || s == "+1") return 1;
  if (s == "-1") return -1;
  throw DataError("expected +-1 value, got '" + s + "'");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path.string());
  return out;
}

/// Yields non-comment lines; the first one must equal the expected header.
class TsvReader {
 public:
  TsvReader(const std::filesystem::path& path, const std::string& header)
      : path_(path), in_(open_input(path)) {
    std::string first;
    if (!next_raw(first)) {
      throw DataError(path.string() + ": missing header row");
    }
    if (first != header) {
      throw DataError(path.string() + ": expected header '" + header + "', got '" +
                      first + "'");
    }
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    if (!next_raw(line)) return false;
    fields = split_tabs(line);
    return true;
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  bool next_raw(std::string& line) {
    while (std::getline(in_, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string scoped_entity_key(const Database& db, EntityId id) {
  return std::string(to_string(db.registry().kind_of(id))) + ":" +
         db.registry().key_of(id);
}

EntityId lookup_scoped_key(const Database& db, const std::string& scoped) {
  const auto colon = scoped.find(':');
  if (colon == std::string::npos) {
    throw DataError("entity key missing kind prefix: '" + scoped + "'");
  }
  const EntityKind kind = kind_from_string(scoped.substr(0, colon));
  const auto id = db.registry().find(kind, scoped.substr(colon + 1));
  if (!id) throw DataError("entity not in registry: '" + scoped + "'");
  return *id;
}

constexpr const char* kRelationsHeader = "relation\tfirst_key\tsecond_key\tvalue";

}  // namespace

Database load_relations_tsv(const std::filesystem::path& path) {
  TsvReader reader(path, kRelationsHeader);
  Database db;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 4) {
      throw DataError(path.string() + ": expected 4 columns, got " +
                      std::to_string(f.size()));
    }
    const Relation rel = relation_from_string(f[0]);
    const auto schema = relation_schema(rel);
    const EntityId first = db.registry().register_entity(schema[0], f[1]);
    const EntityId second = db.registry().register_entity(schema[1], f[2]);
    const std::int8_t label = rel == Relation::R
                                  ? binarize_rating(parse_int(f[3], "stars"))
                                  : parse_pm_one(f[3]);
    db.add_triple({rel, first, second, label});
  }
  return db;
}

void save_relations_tsv(const std::filesystem::path& path, const Database& db) {
  auto out = open_output(path);
  out << kRelationsHeader << "\n";
  for (const auto& t : db.triples()) {
    out << to_string(t.relation) << '\t' << db.registry().key_of(t.first) << '\t'
        << db.registry().key_of(t.second) << '\t';
    if (t.relation == Relation::R) {
      out << (t.label > 0 ? 5 : 1);
    } else {
      out << int(t.label);
    }
    out << "\n";
  }
}

void save_groundtruth_tsv(const std::filesystem::path& path, const Database& db,
                          const LatentMatrix& phi) {
  auto out = open_output(path);
  out << "entity_key";
  for (int d = 1; d <= phi.k(); ++d) out << "\tv" << d;
  out << "\n";
  for (EntityId id = 0; id < db.registry().size(); ++id) {
    out << scoped_entity_key(db, id);
    const auto v = phi.vec(id);
    for (int d = 0; d < phi.k(); ++d) out << '\t' << format_double(v[d]);
    out << "\n";
  }
}

LatentMatrix load_groundtruth_tsv(const std::filesystem::path& path,
                                  const Database& db) {
  auto in = open_input(path);
  std::string line;
  int k = -1;
  LatentMatrix phi;
  std::vector<bool> seen(db.registry().size(), false);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (k < 0) {
      if (f.empty() || f[0] != "entity_key") {
        throw DataError(path.string() + ": missing entity_key header");
      }
      k = static_cast<int>(f.size()) - 1;
      if (k <= 0) throw DataError(path.string() + ": no factor columns");
      phi = LatentMatrix(k, db.registry().size());
      continue;
    }
    if (static_cast<int>(f.size()) != k + 1) {
      throw DataError(path.string() + ": row with wrong column count");
    }
    const EntityId id = lookup_scoped_key(db, f[0]);
    seen[id] = true;
    for (int d = 0; d < k; ++d) {
      phi.vec(id)[d] = std::stod(f[d + 1]);
    }
  }
  if (k < 0) throw DataError(path.string() + ": empty factor file");
  for (EntityId id = 0; id < seen.size(); ++id) {
    if (!seen[id]) {
      throw DataError(path.string() + ": no factors for entity '" +
                      scoped_entity_key(db, id) + "'");
    }
  }
  return phi;
}

Database ingest_yelp(const std::filesystem::path& ratings_path,
                     const std::filesystem::path& business_categories_path,
                     const YelpIngestOptions& options) {
  struct RatingRow { std::string user, business; int stars; };
  struct BcRow { std::string business, category; };

  std::vector<RatingRow> ratings;
  {
    TsvReader reader(ratings_path, "user_key\tbusiness_key\tstars");
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (f.size() != 3) throw DataError(ratings_path.string() + ": expected 3 columns");
      ratings.push_back({f[0], f[1], parse_int(f[2], "stars")});
    }
  }
  std::vector<BcRow> bc_rows;
  {
    TsvReader reader(business_categories_path, "business_key\tcategory_key");
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (f.size() != 2) {
        throw DataError(business_categories_path.string() + ": expected 2 columns");
      }
      bc_rows.push_back({f[0], f[1]});
    }
  }

  // frequency filters, applied before any entity is registered
  std::map<std::string, int> ratings_per_user;
  for (const auto& r : ratings) ++ratings_per_user[r.user];
  std::map<std::string, std::set<std::string>> businesses_per_category;
  for (const auto& b : bc_rows) businesses_per_category[b.category].insert(b.business);

  const auto user_kept = [&](const std::string& u) {
    return ratings_per_user[u] >= options.min_user_ratings;
  };
  const auto category_kept = [&](const std::string& c) {
    return static_cast<int>(businesses_per_category[c].size()) >=
           options.min_category_businesses;
  };

  Database db;
  std::vector<RelationTriple> r_triples, bc_triples;
  for (const auto& r : ratings) {
    if (!user_kept(r.user)) continue;
    const EntityId b = db.registry().register_entity(EntityKind::Business, r.business);
    const EntityId u = db.registry().register_entity(EntityKind::User, r.user);
    r_triples.push_back({Relation::R, b, u, binarize_rating(r.stars)});
  }
  for (const auto& row : bc_rows) {
    if (!category_kept(row.category)) continue;
    const EntityId b = db.registry().register_entity(EntityKind::Business, row.business);
    const EntityId c = db.registry().register_entity(EntityKind::Category, row.category);
    bc_triples.push_back({Relation::BC, b, c, 1});
  }
  for (const auto& t : r_triples) db.add_triple(t);
  for (const auto& t : bc_triples) db.add_triple(t);
  for (const auto& t :
       build_user_categories(db.registry(), r_triples, bc_triples, options.seed)) {
    db.add_triple(t);
  }
  return db;
}

}  // namespace cmfal
