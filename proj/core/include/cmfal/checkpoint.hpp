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

#ifndef CMFAL_CHECKPOINT_HPP
#define CMFAL_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>

#include "cmfal/database.hpp"
#include "cmfal/latent.hpp"
#include "cmfal/model.hpp"

namespace cmfal {

struct CheckpointMeta {
  int k = 0;
  double lambda = 0.0;
  double eta = 0.0;
  int epochs = 0;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  LatentMatrix phi;
  CheckpointMeta meta;
};

/// Model checkpoint: a key-value header line followed by one
/// entity_key<TAB>v1..vk row per entity at 17 significant digits.
/// save/load round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const Database& db,
                     const LatentMatrix& phi, const CheckpointMeta& meta);
Checkpoint load_checkpoint(const std::filesystem::path& path, const Database& db);

}  // namespace cmfal

#endif  // CMFAL_CHECKPOINT_HPP
