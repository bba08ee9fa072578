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

#ifndef CMFAL_EXPERIMENT_HPP
#define CMFAL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "cmfal/database.hpp"
#include "cmfal/latent.hpp"
#include "cmfal/model.hpp"
#include "cmfal/selectors.hpp"
#include "cmfal/split.hpp"

namespace cmfal {

enum class Protocol { Personalized, ColdStart, Noisy };

enum class OracleMode { Pretrained, NoisyGroundTruth };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

/// One user's active-learning session: answered labels, remaining
/// candidates, and the cumulative question list.
struct ALSessionState {
  EntityId user = 0;
  std::vector<std::pair<EntityId, int>> labeled;  // sorted by entity id
  std::vector<EntityId> pool;                     // sorted
  std::vector<EntityId> asked;
  int iteration = 0;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::Personalized;
  RelationMask relations = RelationMask::all();
  Hyperparams hp;
  int iterations = 25;          ///< active-learning rounds T
  int questions_per_round = 1;  ///< M
  double user_fraction = 0.25;  ///< users asked per round (personalized)
  int mc_trials = 50;
  std::uint64_t master_seed = 1;
  double test_frac = 0.3;
  double train_frac = 0.1;
  double cold_frac = 0.4;
  std::vector<SelectorKind> selectors = {
      SelectorKind::Fisher,         SelectorKind::ApproxAInverse,
      SelectorKind::ApproxMaxTrace, SelectorKind::Uncertainty,
      SelectorKind::MaxModelChange, SelectorKind::MinModelChange,
      SelectorKind::Random};
  int full_retrain_every = 0;  ///< 0 = per-user refits only
  int threads = 0;             ///< 0 = hardware concurrency

  void validate() const;
};

struct ResultRow {
  SelectorKind selector;
  int iteration;
  double f1_mean;
  double f1_std;
  int n_trials;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

struct TraceRow {
  SelectorKind selector;
  int trial;
  int iteration;
  double f1;
};

struct BoundsResult {
  double lower = 0.0;  ///< mean F1 of the initial-split model
  double upper = 0.0;  ///< mean F1 of the all-training-data model
};

struct ExperimentResult {
  ResultTable table;
  BoundsResult bounds;
  std::vector<TraceRow> trace;  ///< raw per-trial F1 for re-analysis
};

/// Simulated user response. Pretrained thresholds the reference model's
/// probability at 0.5; NoisyGroundTruth draws a fresh +-1 from the true
/// model, deterministically in (trial_seed, user, entity).
std::int8_t oracle_answer(OracleMode mode, const LatentMatrix& reference,
                          EntityId user, EntityId entity, std::uint64_t trial_seed);

/// Runs the configured protocol over mc_trials Monte Carlo trials. All
/// selectors inside a trial share the split, the initial model and the
/// oracle streams, so curve differences are attributable to selection.
/// Noisy protocol requires the synthetic ground truth.
ExperimentResult run_experiment(const Database& db, const ExperimentConfig& cfg,
                                const LatentMatrix* ground_truth = nullptr);

ExperimentResult run_personalized(const Database& db, const ExperimentConfig& cfg);
ExperimentResult run_cold_start(const Database& db, const ExperimentConfig& cfg);
ExperimentResult run_noisy(const Database& db, const ExperimentConfig& cfg,
                           const LatentMatrix& ground_truth);

/// Lower / upper bound baselines only (no active learning loop).
BoundsResult run_bounds(const Database& db, const ExperimentConfig& cfg);

/// Column-wise mean and sample standard deviation of a trials x iterations
/// matrix. Throws DataError on empty or ragged input.
std::pair<std::vector<double>, std::vector<double>> aggregate_mc(
    const std::vector<std::vector<double>>& per_trial_f1);

/// Seed schedule: trial i runs on master_seed + i * 10007; sub-streams
/// (split, init, user sampling, oracle, random selector) derive from the
/// trial seed with fixed tags.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

int resolve_thread_count(int configured);

void write_results_csv(const std::filesystem::path& path, const ResultTable& table);
void write_bounds_csv(const std::filesystem::path& path, const BoundsResult& bounds);
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace);
ResultTable load_results_csv(const std::filesystem::path& path);

}  // namespace cmfal

#endif  // CMFAL_EXPERIMENT_HPP
