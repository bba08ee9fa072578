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

#include "cmfal/selectors.hpp"

#include <algorithm>
#include <vector>

#include "cmfal/model.hpp"
#include "cmfal/rng.hpp"

namespace cmfal {

namespace {

void check_args(std::span<const EntityId> pool, int m) {
  if (m <= 0) throw DataError("selection: M must be positive");
  if (static_cast<std::size_t>(m) > pool.size()) {
    throw DataError("selection: M=" + std::to_string(m) + " exceeds pool size " +
                    std::to_string(pool.size()));
  }
}

/// Top-M by score with lowest-id tie break; `descending` picks highest
/// scores first.
SelectionResult top_m_by_score(std::span<const EntityId> pool,
                               const std::vector<double>& scores, int m,
                               bool descending, SelectorKind strategy) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return descending ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return pool[a] < pool[b];
  });
  SelectionResult result;
  result.strategy = strategy;
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    result.chosen.push_back(pool[order[i]]);
    total += scores[order[i]];
  }
  result.objective_value = total;
  return result;
}

}  // namespace

SelectionResult select_uncertainty(std::span<const EntityId> pool, int m,
                                   const LatentMatrix& phi, EntityId user) {
  check_args(pool, m);
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (EntityId e : pool) {
    const double p = sigmoid(phi.dot(e, user));
    scores.push_back(p * (1.0 - p));
  }
  return top_m_by_score(pool, scores, m, /*descending=*/true,
                        SelectorKind::Uncertainty);
}

SelectionResult select_model_change(std::span<const EntityId> pool, int m,
                                    const LatentMatrix& phi, EntityId user,
                                    double eta, ChangeDirection direction) {
  check_args(pool, m);
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (EntityId e : pool) {
    const double s = phi.dot(e, user);
    const double w = sigmoid(s) * sigmoid(-s);
    scores.push_back(2.0 * eta * w * phi.vec(e).norm());
  }
  const bool descending = direction == ChangeDirection::Max;
  return top_m_by_score(pool, scores, m, descending,
                        direction == ChangeDirection::Max
                            ? SelectorKind::MaxModelChange
                            : SelectorKind::MinModelChange);
}

SelectionResult select_random(std::span<const EntityId> pool, int m,
                              std::uint64_t seed) {
  check_args(pool, m);
  Rng rng(seed);
  const auto idx = rng.sample_without_replacement(pool.size(), static_cast<std::size_t>(m));
  SelectionResult result;
  result.strategy = SelectorKind::Random;
  for (std::size_t i : idx) result.chosen.push_back(pool[i]);
  return result;
}

SelectionResult run_selector(SelectorKind kind, std::span<const EntityId> pool,
                             int m, const LatentMatrix& phi, EntityId user,
                             const SelectorContext& ctx) {
  switch (kind) {
    case SelectorKind::Fisher:
      return select_fisher(pool, m, phi, user, ctx.lambda, ctx.fisher_target);
    case SelectorKind::ApproxAInverse:
    case SelectorKind::ApproxMaxTrace:
      return select_approx(pool, m, phi, user, ctx.lambda, kind);
    case SelectorKind::Uncertainty:
      return select_uncertainty(pool, m, phi, user);
    case SelectorKind::MaxModelChange:
      return select_model_change(pool, m, phi, user, ctx.eta, ChangeDirection::Max);
    case SelectorKind::MinModelChange:
      return select_model_change(pool, m, phi, user, ctx.eta, ChangeDirection::Min);
    case SelectorKind::Random:
      return select_random(pool, m, ctx.seed);
  }
  throw ConfigError("run_selector: unknown selector kind");
}

}  // namespace cmfal
