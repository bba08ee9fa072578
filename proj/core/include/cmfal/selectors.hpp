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

#ifndef CMFAL_SELECTORS_HPP
#define CMFAL_SELECTORS_HPP

#include <cstdint>
#include <span>

#include "cmfal/fisher.hpp"
#include "cmfal/latent.hpp"

namespace cmfal {

/// Top-M entities by Bernoulli variance p(1-p), p = sigmoid(phi_e.phi_u).
SelectionResult select_uncertainty(std::span<const EntityId> pool, int m,
                                   const LatentMatrix& phi, EntityId user);

enum class ChangeDirection { Max, Min };

/// Expected one-SGD-step model change under the model's own label
/// distribution: 2 eta sigmoid(s) sigmoid(-s) ||phi_e||. Top-M for Max,
/// bottom-M for Min.
SelectionResult select_model_change(std::span<const EntityId> pool, int m,
                                    const LatentMatrix& phi, EntityId user,
                                    double eta, ChangeDirection direction);

/// Uniform sample without replacement; deterministic given the seed.
SelectionResult select_random(std::span<const EntityId> pool, int m,
                              std::uint64_t seed);

struct SelectorContext {
  double lambda = 0.1;
  double eta = 0.02;
  std::uint64_t seed = 0;                   // stream for Random
  std::span<const EntityId> fisher_target;  // optional wider scoring set
};

/// Dispatch over every SelectorKind with one call surface.
SelectionResult run_selector(SelectorKind kind, std::span<const EntityId> pool,
                             int m, const LatentMatrix& phi, EntityId user,
                             const SelectorContext& ctx);

}  // namespace cmfal

#endif  // CMFAL_SELECTORS_HPP
