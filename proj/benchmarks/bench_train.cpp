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

#include "cmfal/model.hpp"
#include "cmfal/rng.hpp"
#include "cmfal/synthetic.hpp"

namespace {

using namespace cmfal;

const SyntheticData& bench_data() {
  static const SyntheticData data = generate_synthetic({100, 100, 40, 10, 0.25, 0.1}, 5);
  return data;
}

void BM_SgdEpoch(benchmark::State& state) {
  Hyperparams hp;
  hp.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgd_train(bench_data().db, bench_data().db.triples(), hp, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(bench_data().db.size()));
}
BENCHMARK(BM_SgdEpoch)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RefitUser(benchmark::State& state) {
  const int n_labeled = static_cast<int>(state.range(0));
  const LatentMatrix& truth = bench_data().ground_truth;
  const EntityId user = 0;
  Rng rng(13);
  std::vector<std::pair<EntityId, int>> labeled;
  for (int i = 0; i < n_labeled; ++i) {
    const EntityId e = static_cast<EntityId>(100 + rng.below(100));
    labeled.emplace_back(e, rng.uniform01() < 0.6 ? 1 : -1);
  }
  std::sort(labeled.begin(), labeled.end());
  labeled.erase(std::unique(labeled.begin(), labeled.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                labeled.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(refit_user(user, labeled, truth, 0.1));
  }
}
BENCHMARK(BM_RefitUser)->Arg(10)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
