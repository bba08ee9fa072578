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

#ifndef CMFAL_SYNTHETIC_HPP
#define CMFAL_SYNTHETIC_HPP

#include <cstdint>

#include "cmfal/database.hpp"
#include "cmfal/latent.hpp"
#include "cmfal/rng.hpp"

namespace cmfal {

struct SyntheticConfig {
  int n_users = 100;
  int n_businesses = 100;
  int n_categories = 40;
  int k = 10;
  double mean = 0.25;  ///< per-coordinate Gaussian mean of the true factors
  double var = 0.1;    ///< per-coordinate Gaussian variance

  void validate() const;
};

struct SyntheticData {
  Database db;
  LatentMatrix ground_truth;
};

/// Draws one label: +1 with probability sigmoid(score).
std::int8_t sample_label(Rng& rng, double score);

/// Generates true factors i.i.d. Gaussian(mean, var) and samples every
/// R, BC and UC cell from the model. Returns both the database and the
/// ground-truth matrix. Deterministic given the seed.
SyntheticData generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed);

}  // namespace cmfal

#endif  // CMFAL_SYNTHETIC_HPP
