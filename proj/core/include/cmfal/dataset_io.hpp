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

#ifndef CMFAL_DATASET_IO_HPP
#define CMFAL_DATASET_IO_HPP

#include <cstdint>
#include <filesystem>

#include "cmfal/database.hpp"
#include "cmfal/latent.hpp"

namespace cmfal {

// Relations file: UTF-8 TSV with header
//   relation<TAB>first_key<TAB>second_key<TAB>value
// where value is raw stars (1-5) on R rows and +-1 on BC/UC rows. Lines
// starting with '#' are ignored. R stars are binarized on load; on save a
// positive label becomes 5 stars and a negative one 1 star.

Database load_relations_tsv(const std::filesystem::path& path);
void save_relations_tsv(const std::filesystem::path& path, const Database& db);

/// Ground-truth sidecar: entity_key<TAB>v1..vk at 17 significant digits,
/// entity keys scoped as kind:external_key.
void save_groundtruth_tsv(const std::filesystem::path& path, const Database& db,
                          const LatentMatrix& phi);
LatentMatrix load_groundtruth_tsv(const std::filesystem::path& path,
                                  const Database& db);

struct YelpIngestOptions {
  int min_user_ratings = 10;        ///< keep users with at least this many ratings
  int min_category_businesses = 5;  ///< keep categories tied to at least this many
  std::uint64_t seed = 0;           ///< negative sampling stream for UC
};

/// Builds a store from raw Yelp-schema TSVs: ratings
/// (user_key<TAB>business_key<TAB>stars) and business categories
/// (business_key<TAB>category_key). Applies the frequency filters, then
/// synthesizes the UC relation with balanced negative sampling.
Database ingest_yelp(const std::filesystem::path& ratings_path,
                     const std::filesystem::path& business_categories_path,
                     const YelpIngestOptions& options);

}  // namespace cmfal

#endif  // CMFAL_DATASET_IO_HPP
