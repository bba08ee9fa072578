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

#include <benchmark/benchmark.h>

#include "cmfal/fisher.hpp"
#include "cmfal/rng.hpp"
#include "cmfal/selectors.hpp"

namespace {

using namespace cmfal;

LatentMatrix bench_latent(int k, std::size_t n) {
  Rng rng(99);
  LatentMatrix phi(k, n);
  for (std::size_t e = 0; e < n; ++e) {
    for (int d = 0; d < k; ++d) {
      phi.vec(static_cast<EntityId>(e))[d] = 0.25 + 0.316 * rng.gaussian();
    }
  }
  return phi;
}

std::vector<EntityId> bench_pool(std::size_t n) {
  std::vector<EntityId> pool;
  for (EntityId e = 0; e + 1 < n; ++e) pool.push_back(e);
  return pool;
}

void BM_SelectFisher(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const std::size_t pool_size = static_cast<std::size_t>(state.range(1));
  const int m = static_cast<int>(state.range(2));
  const LatentMatrix phi = bench_latent(k, pool_size + 1);
  const auto pool = bench_pool(pool_size + 1);
  const EntityId user = static_cast<EntityId>(pool_size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_fisher(pool, m, phi, user, 0.1));
  }
}
BENCHMARK(BM_SelectFisher)
    ->Args({10, 64, 1})
    ->Args({10, 140, 1})
    ->Args({30, 140, 1})
    ->Args({10, 140, 10});

void BM_SelectMaxTrace(benchmark::State& state) {
  const LatentMatrix phi = bench_latent(10, 141);
  const auto pool = bench_pool(141);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_approx(pool, 1, phi, 140, 0.1, SelectorKind::ApproxMaxTrace));
  }
}
BENCHMARK(BM_SelectMaxTrace);

void BM_SelectUncertainty(benchmark::State& state) {
  const LatentMatrix phi = bench_latent(10, 141);
  const auto pool = bench_pool(141);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_uncertainty(pool, 1, phi, 140));
  }
}
BENCHMARK(BM_SelectUncertainty);

}  // namespace
