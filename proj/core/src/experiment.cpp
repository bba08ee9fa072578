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

#include "cmfal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cmfal/rng.hpp"
#include "cmfal/synthetic.hpp"

namespace cmfal {

namespace {

constexpr std::uint64_t kSplitTag = 0x53504C49;    // trial split stream
constexpr std::uint64_t kInitTag = 0x494E4954;     // model init stream
constexpr std::uint64_t kUsersTag = 0x55534552;    // per-round user sampling
constexpr std::uint64_t kOracleTag = 0x4F52434C;   // noisy oracle stream
constexpr std::uint64_t kRandSelTag = 0x52414E44;  // random selector stream

EntityId user_of(const RelationTriple& t) {
  return t.relation == Relation::R ? t.second : t.first;
}

EntityId entity_of(const RelationTriple& t) {
  return t.relation == Relation::R ? t.first : t.second;
}

RelationTriple answered_triple(const Database& db, EntityId user, EntityId entity,
                               std::int8_t label) {
  if (db.registry().kind_of(entity) == EntityKind::Business) {
    return {Relation::R, entity, user, label};
  }
  return {Relation::UC, user, entity, label};
}

struct SelectorState {
  LatentMatrix phi;
  std::map<EntityId, ALSessionState> sessions;
};

/// F1 of thresholded predictions against the R test triples.
double test_f1(const LatentMatrix& phi, const std::vector<RelationTriple>& test_r) {
  std::vector<int> preds, labels;
  preds.reserve(test_r.size());
  labels.reserve(test_r.size());
  for (const auto& t : test_r) {
    preds.push_back(predict(phi, t.first, t.second).label);
    labels.push_back(t.label);
  }
  return f1_score(preds, labels);
}

struct TrialOutput {
  // f1[selector_index][iteration]
  std::vector<std::vector<double>> f1;
  double lower = 0.0;
  double upper = 0.0;
};

TrialOutput run_trial(const Database& db, const ExperimentConfig& cfg,
                      const LatentMatrix* ground_truth, int trial) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, trial);
  const OracleMode oracle_mode = cfg.protocol == Protocol::Noisy
                                     ? OracleMode::NoisyGroundTruth
                                     : OracleMode::Pretrained;

  const Split split =
      cfg.protocol == Protocol::ColdStart
          ? split_cold_start(db, cfg.relations, cfg.cold_frac, mix_seed(seed, kSplitTag))
          : split_personalized(db, cfg.relations, cfg.test_frac, cfg.train_frac,
                               mix_seed(seed, kSplitTag));

  const std::uint64_t init_seed = mix_seed(seed, kInitTag);
  const LatentMatrix initial = sgd_train(db, split.train, cfg.hp, init_seed);

  std::vector<RelationTriple> all_training = split.train;
  all_training.insert(all_training.end(), split.pool.begin(), split.pool.end());
  const LatentMatrix reference = sgd_train(db, all_training, cfg.hp, init_seed);

  std::vector<RelationTriple> test_r;
  for (const auto& t : split.test) {
    if (t.relation == Relation::R) test_r.push_back(t);
  }
  if (test_r.empty()) throw DataError("experiment: no R test triples");

  // per-user sessions; identical starting point for every selector
  std::map<EntityId, ALSessionState> base_sessions;
  const bool cold = cfg.protocol == Protocol::ColdStart;
  for (const auto& t : split.pool) {
    auto& s = base_sessions[user_of(t)];
    s.user = user_of(t);
    s.pool.push_back(entity_of(t));
  }
  if (!cold) {
    for (const auto& t : split.train) {
      if (t.relation == Relation::BC) continue;
      auto it = base_sessions.find(user_of(t));
      if (it == base_sessions.end()) continue;  // user has no pool, never asked
      it->second.labeled.emplace_back(entity_of(t), t.label);
    }
  }
  for (auto& [user, s] : base_sessions) {
    std::sort(s.pool.begin(), s.pool.end());
    std::sort(s.labeled.begin(), s.labeled.end());
  }

  const int n_selectors = static_cast<int>(cfg.selectors.size());
  std::vector<SelectorState> states(static_cast<std::size_t>(n_selectors));
  for (auto& st : states) {
    st.phi = initial;
    st.sessions = base_sessions;
  }

  TrialOutput out;
  out.lower = test_f1(initial, test_r);
  out.upper = test_f1(reference, test_r);
  out.f1.assign(static_cast<std::size_t>(n_selectors), {});
  for (auto& curve : out.f1) curve.push_back(out.lower);  // iteration 0

  const LatentMatrix& oracle_model =
      oracle_mode == OracleMode::NoisyGroundTruth ? *ground_truth : reference;

  std::vector<EntityId> users;
  for (const auto& [user, _] : base_sessions) users.push_back(user);

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    // pool sizes evolve identically across selectors, so eligibility and
    // the sampled user subset are shared within the trial
    std::vector<EntityId> eligible;
    for (EntityId u : users) {
      const auto& s = states[0].sessions.at(u);
      if (static_cast<int>(s.pool.size()) >= cfg.questions_per_round) {
        eligible.push_back(u);
      }
    }
    std::vector<EntityId> asked_users;
    if (cold) {
      asked_users = eligible;
    } else {
      const auto want = static_cast<std::size_t>(
          std::floor(eligible.size() * cfg.user_fraction));
      Rng rng(mix_seed(seed, kUsersTag, static_cast<std::uint64_t>(iter)));
      const auto idx = rng.sample_without_replacement(eligible.size(), want);
      for (std::size_t i : idx) asked_users.push_back(eligible[i]);
      std::sort(asked_users.begin(), asked_users.end());
    }

    for (int si = 0; si < n_selectors; ++si) {
      SelectorState& st = states[si];
      const SelectorKind kind = cfg.selectors[si];
      for (EntityId u : asked_users) {
        ALSessionState& session = st.sessions.at(u);
        SelectorContext ctx;
        ctx.lambda = cfg.hp.lambda;
        ctx.eta = cfg.hp.eta;
        ctx.seed = mix_seed(seed, kRandSelTag, u, static_cast<std::uint64_t>(iter));
        const SelectionResult picked =
            run_selector(kind, session.pool, cfg.questions_per_round, st.phi, u, ctx);
        for (EntityId e : picked.chosen) {
          const std::int8_t answer = oracle_answer(oracle_mode, oracle_model, u, e, seed);
          session.asked.push_back(e);
          auto pos = std::lower_bound(session.labeled.begin(), session.labeled.end(),
                                      std::make_pair(e, 0),
                                      [](const auto& a, const auto& b) {
                                        return a.first < b.first;
                                      });
          session.labeled.insert(pos, {e, answer});
          session.pool.erase(
              std::lower_bound(session.pool.begin(), session.pool.end(), e));
        }
        session.iteration = iter;
        st.phi.vec(u) = refit_user(u, session.labeled, st.phi, cfg.hp.lambda);
      }
      if (cfg.full_retrain_every > 0 && iter % cfg.full_retrain_every == 0) {
        std::vector<RelationTriple> training = split.train;
        for (const auto& [u, session] : st.sessions) {
          for (EntityId e : session.asked) {
            const auto lab = std::lower_bound(
                session.labeled.begin(), session.labeled.end(), std::make_pair(e, 0),
                [](const auto& a, const auto& b) { return a.first < b.first; });
            training.push_back(answered_triple(db, u, e, static_cast<std::int8_t>(lab->second)));
          }
        }
        st.phi = sgd_train(db, training, cfg.hp, init_seed);
      }
      out.f1[static_cast<std::size_t>(si)].push_back(test_f1(st.phi, test_r));
    }
  }
  return out;
}

}  // namespace

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Personalized: return "personalized";
    case Protocol::ColdStart:    return "cold-start";
    case Protocol::Noisy:        return "noisy";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "personalized") return Protocol::Personalized;
  if (s == "cold-start") return Protocol::ColdStart;
  if (s == "noisy") return Protocol::Noisy;
  throw ConfigError("unknown protocol: '" + s + "'");
}

void ExperimentConfig::validate() const {
  hp.validate();
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (questions_per_round <= 0) throw ConfigError("questions_per_round must be > 0");
  if (user_fraction < 0.0 || user_fraction > 1.0) {
    throw ConfigError("user_fraction must be in [0, 1]");
  }
  if (mc_trials < 1) throw ConfigError("mc_trials must be >= 1");
  if (test_frac < 0.0 || train_frac < 0.0 || test_frac + train_frac > 1.0) {
    throw ConfigError("test_frac + train_frac must be <= 1");
  }
  if (cold_frac <= 0.0 || cold_frac >= 1.0) {
    throw ConfigError("cold_frac must be in (0, 1)");
  }
  if (selectors.empty()) throw ConfigError("selector list is empty");
  if (full_retrain_every < 0) throw ConfigError("full_retrain_every must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!relations.r) throw ConfigError("the R relation cannot be disabled");
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  return master_seed + static_cast<std::uint64_t>(trial) * 10007ULL;
}

std::int8_t oracle_answer(OracleMode mode, const LatentMatrix& reference,
                          EntityId user, EntityId entity, std::uint64_t seed) {
  if (mode == OracleMode::Pretrained) {
    return static_cast<std::int8_t>(predict(reference, entity, user).label);
  }
  Rng rng(mix_seed(seed, kOracleTag, user, entity));
  return sample_label(rng, reference.dot(entity, user));
}

int resolve_thread_count(int configured) {
  if (const char* env = std::getenv("CMF_ACTIVE_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) configured = parsed;
  }
  if (configured <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    configured = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return configured;
}

ExperimentResult run_experiment(const Database& db, const ExperimentConfig& cfg,
                                const LatentMatrix* ground_truth) {
  cfg.validate();
  if (cfg.protocol == Protocol::Noisy && ground_truth == nullptr) {
    throw DataError("noisy protocol: ground truth required");
  }

  std::vector<TrialOutput> outputs(static_cast<std::size_t>(cfg.mc_trials));
  const int n_threads = std::min(resolve_thread_count(cfg.threads), cfg.mc_trials);
  std::atomic<int> next_trial{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  const auto worker = [&]() {
    while (true) {
      const int trial = next_trial.fetch_add(1);
      if (trial >= cfg.mc_trials || failed.load()) return;
      try {
        outputs[static_cast<std::size_t>(trial)] = run_trial(db, cfg, ground_truth, trial);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) throw NumericalError("experiment trial failed: " + failure);

  ExperimentResult result;
  const int n_iters = cfg.iterations + 1;
  for (std::size_t si = 0; si < cfg.selectors.size(); ++si) {
    std::vector<std::vector<double>> matrix;
    matrix.reserve(static_cast<std::size_t>(cfg.mc_trials));
    for (int trial = 0; trial < cfg.mc_trials; ++trial) {
      matrix.push_back(outputs[static_cast<std::size_t>(trial)].f1[si]);
      for (int it = 0; it < n_iters; ++it) {
        result.trace.push_back(
            {cfg.selectors[si], trial, it, matrix.back()[static_cast<std::size_t>(it)]});
      }
    }
    const auto [means, stds] = aggregate_mc(matrix);
    for (int it = 0; it < n_iters; ++it) {
      result.table.rows.push_back({cfg.selectors[si], it,
                                   means[static_cast<std::size_t>(it)],
                                   stds[static_cast<std::size_t>(it)], cfg.mc_trials});
    }
  }
  double lower = 0.0, upper = 0.0;
  for (const auto& out : outputs) {
    lower += out.lower;
    upper += out.upper;
  }
  result.bounds.lower = lower / cfg.mc_trials;
  result.bounds.upper = upper / cfg.mc_trials;
  return result;
}

ExperimentResult run_personalized(const Database& db, const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.protocol = Protocol::Personalized;
  return run_experiment(db, c);
}

ExperimentResult run_cold_start(const Database& db, const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.protocol = Protocol::ColdStart;
  return run_experiment(db, c);
}

ExperimentResult run_noisy(const Database& db, const ExperimentConfig& cfg,
                           const LatentMatrix& ground_truth) {
  ExperimentConfig c = cfg;
  c.protocol = Protocol::Noisy;
  return run_experiment(db, c, &ground_truth);
}

BoundsResult run_bounds(const Database& db, const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.iterations = 0;
  c.selectors = {SelectorKind::Random};
  if (c.protocol == Protocol::Noisy) c.protocol = Protocol::Personalized;
  const ExperimentResult r = run_experiment(db, c);
  return r.bounds;
}

std::pair<std::vector<double>, std::vector<double>> aggregate_mc(
    const std::vector<std::vector<double>>& per_trial_f1) {
  if (per_trial_f1.empty() || per_trial_f1.front().empty()) {
    throw DataError("aggregate_mc: empty input");
  }
  const std::size_t n_iter = per_trial_f1.front().size();
  for (const auto& row : per_trial_f1) {
    if (row.size() != n_iter) throw DataError("aggregate_mc: ragged input");
  }
  const auto n = static_cast<double>(per_trial_f1.size());
  std::vector<double> means(n_iter, 0.0), stds(n_iter, 0.0);
  for (std::size_t it = 0; it < n_iter; ++it) {
    double sum = 0.0;
    for (const auto& row : per_trial_f1) sum += row[it];
    means[it] = sum / n;
    if (per_trial_f1.size() > 1) {
      double ss = 0.0;
      for (const auto& row : per_trial_f1) {
        const double d = row[it] - means[it];
        ss += d * d;
      }
      stds[it] = std::sqrt(ss / (n - 1.0));
    }
  }
  return {means, stds};
}

namespace {
std::string format_f1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

void write_results_csv(const std::filesystem::path& path, const ResultTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "selector,iteration,f1_mean,f1_std,n_trials\n";
  for (const auto& row : table.rows) {
    out << selector_name(row.selector) << ',' << row.iteration << ','
        << format_f1(row.f1_mean) << ',' << format_f1(row.f1_std) << ','
        << row.n_trials << "\n";
  }
}

void write_bounds_csv(const std::filesystem::path& path, const BoundsResult& bounds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "bound,f1\n";
  out << "lower," << format_f1(bounds.lower) << "\n";
  out << "upper," << format_f1(bounds.upper) << "\n";
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "selector,trial,iteration,f1\n";
  for (const auto& row : trace) {
    out << selector_name(row.selector) << ',' << row.trial << ',' << row.iteration
        << ',' << format_f1(row.f1) << "\n";
  }
}

ResultTable load_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "selector,iteration,f1_mean,f1_std,n_trials") {
    throw DataError(path.string() + ": not a results.csv file");
  }
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string selector, field;
    ResultRow row;
    std::getline(ss, selector, ',');
    row.selector = selector_from_name(selector);
    std::getline(ss, field, ',');
    row.iteration = std::stoi(field);
    std::getline(ss, field, ',');
    row.f1_mean = std::stod(field);
    std::getline(ss, field, ',');
    row.f1_std = std::stod(field);
    std::getline(ss, field, ',');
    row.n_trials = std::stoi(field);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace cmfal
