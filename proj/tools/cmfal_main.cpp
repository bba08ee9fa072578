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

// cmfal command-line driver:
//   generate    synthesize a dataset from the generative model
//   ingest      build a relations file from raw Yelp-schema TSVs
//   train       fit the factor model and write a checkpoint
//   experiment  run an active-learning protocol and write results CSVs
//   report      render results.csv into a plot-ready long-format TSV

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cmfal/checkpoint.hpp"
#include "cmfal/config.hpp"
#include "cmfal/dataset_io.hpp"
#include "cmfal/experiment.hpp"
#include "cmfal/manifest.hpp"
#include "cmfal/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cmfal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

RunManifest make_manifest(const std::string& command, const std::string& config_path,
                          const ConfigMap& cfg) {
  RunManifest m;
  m.command = command;
  m.config_path = config_path;
  m.resolved_config = cfg.values();
  m.tool_version = tool_version();
  return m;
}

void finish_manifest(RunManifest& m, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& outputs, const fs::path& out_dir) {
  for (const auto& p : inputs) m.input_fingerprints[p.string()] = file_fingerprint(p);
  for (const auto& p : outputs) m.outputs.push_back(p.string());
  write_manifest(out_dir / "manifest.json", m);
}

ConfigMap load_config(const std::string& path) {
  ConfigMap cfg = ConfigMap::parse_file(path);
  cfg.reject_unknown_keys();
  return cfg;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir_s) {
  const ConfigMap cfg = load_config(config_path);
  const SyntheticConfig scfg = synthetic_config_from(cfg);
  const std::uint64_t seed = cfg.get_u64("master_seed", 1);

  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  const SyntheticData data = generate_synthetic(scfg, seed);

  const fs::path relations = out_dir / "relations.tsv";
  const fs::path groundtruth = out_dir / "groundtruth.tsv";
  save_relations_tsv(relations, data.db);
  save_groundtruth_tsv(groundtruth, data.db, data.ground_truth);

  RunManifest m = make_manifest("generate", config_path, cfg);
  finish_manifest(m, {relations, groundtruth}, {relations, groundtruth}, out_dir);
  std::cout << "generated " << data.db.registry().size() << " entities, "
            << data.db.size() << " triples -> " << relations.string() << "\n";
  return kExitOk;
}

int cmd_ingest(const std::string& ratings, const std::string& bc,
               const std::string& config_path, const std::string& out_dir_s) {
  const ConfigMap cfg = load_config(config_path);
  YelpIngestOptions options;
  options.min_user_ratings = cfg.get_int("min_user_ratings", options.min_user_ratings);
  options.min_category_businesses =
      cfg.get_int("min_category_businesses", options.min_category_businesses);
  options.seed = cfg.get_u64("master_seed", 1);

  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  const Database db = ingest_yelp(ratings, bc, options);
  const fs::path relations = out_dir / "relations.tsv";
  save_relations_tsv(relations, db);

  RunManifest m = make_manifest("ingest", config_path, cfg);
  finish_manifest(m, {fs::path(ratings), fs::path(bc)}, {relations}, out_dir);
  std::cout << "ingested " << db.registry().count_of_kind(EntityKind::User)
            << " users, " << db.registry().count_of_kind(EntityKind::Business)
            << " businesses, " << db.registry().count_of_kind(EntityKind::Category)
            << " categories, " << db.size() << " triples -> " << relations.string()
            << "\n";
  return kExitOk;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_path, const std::string& init_from) {
  const ConfigMap cfg = load_config(config_path);
  const Hyperparams hp = hyperparams_from(cfg);
  const std::uint64_t seed = cfg.get_u64("master_seed", 1);
  RelationMask mask = RelationMask::all();
  if (cfg.has("relations")) {
    const ExperimentConfig ecfg = experiment_config_from(cfg);
    mask = ecfg.relations;
  }

  const Database db = load_relations_tsv(data_path);
  const auto train_triples = db.triples_matching(mask);

  LatentMatrix phi;
  if (!init_from.empty()) {
    Checkpoint start = load_checkpoint(init_from, db);
    if (start.meta.k != hp.k) {
      throw ConfigError("checkpoint k=" + std::to_string(start.meta.k) +
                        " does not match configured k=" + std::to_string(hp.k));
    }
    phi = sgd_train(db, train_triples, hp, seed, nullptr, &start.phi);
  } else {
    phi = sgd_train(db, train_triples, hp, seed);
  }

  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_checkpoint(out, db, phi,
                  {hp.k, hp.lambda, hp.eta, hp.epochs, seed});

  RunManifest m = make_manifest("train", config_path, cfg);
  const fs::path out_dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  finish_manifest(m, {fs::path(data_path)}, {out}, out_dir);
  std::cout << "trained k=" << hp.k << " model on " << train_triples.size()
            << " triples -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& protocol_s, const std::string& data_path,
                   const std::string& config_path, const std::string& out_dir_s,
                   const std::string& groundtruth_path, const std::string& selectors_arg,
                   bool trace) {
  const ConfigMap cfg = load_config(config_path);
  ExperimentConfig ecfg = experiment_config_from(cfg);
  ecfg.protocol = protocol_from_string(protocol_s);
  if (!selectors_arg.empty()) {
    ecfg.selectors.clear();
    std::istringstream ss(selectors_arg);
    std::string item;
    while (std::getline(ss, item, ',')) ecfg.selectors.push_back(selector_from_name(item));
  }

  const Database db = load_relations_tsv(data_path);

  LatentMatrix ground_truth;
  const LatentMatrix* truth_ptr = nullptr;
  fs::path truth_file;
  if (ecfg.protocol == Protocol::Noisy) {
    truth_file = groundtruth_path.empty()
                     ? fs::path(data_path).parent_path() / "groundtruth.tsv"
                     : fs::path(groundtruth_path);
    if (!fs::exists(truth_file)) {
      throw DataError("noisy protocol: ground truth required (looked for " +
                      truth_file.string() + ")");
    }
    ground_truth = load_groundtruth_tsv(truth_file, db);
    truth_ptr = &ground_truth;
  }

  const ExperimentResult result = run_experiment(db, ecfg, truth_ptr);

  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  const fs::path results = out_dir / "results.csv";
  const fs::path bounds = out_dir / "bounds.csv";
  write_results_csv(results, result.table);
  write_bounds_csv(bounds, result.bounds);
  std::vector<fs::path> outputs = {results, bounds};
  if (trace) {
    const fs::path trace_path = out_dir / "trace.csv";
    write_trace_csv(trace_path, result.trace);
    outputs.push_back(trace_path);
  }

  RunManifest m = make_manifest("experiment " + protocol_s, config_path, cfg);
  std::vector<fs::path> inputs = {fs::path(data_path)};
  if (truth_ptr) inputs.push_back(truth_file);
  finish_manifest(m, inputs, outputs, out_dir);

  std::cout << "experiment " << protocol_s << ": " << result.table.rows.size()
            << " rows, bounds [" << result.bounds.lower << ", " << result.bounds.upper
            << "] -> " << results.string() << "\n";
  return kExitOk;
}

// Renders results.csv (+ optional bounds.csv) into one long-format TSV with
// a confidence band, ready for any plotting tool.
int cmd_report(const std::string& results_path, const std::string& bounds_path,
               const std::string& out_path) {
  const ResultTable table = load_results_csv(results_path);
  int max_iter = 0;
  for (const auto& row : table.rows) max_iter = std::max(max_iter, row.iteration);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  out << "series\titeration\tf1\tf1_lo\tf1_hi\n";
  char buf[128];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%s\t%d\t%.6f\t%.6f\t%.6f\n",
                  selector_name(row.selector), row.iteration, row.f1_mean,
                  row.f1_mean - row.f1_std, row.f1_mean + row.f1_std);
    out << buf;
  }
  if (!bounds_path.empty()) {
    std::ifstream in(bounds_path);
    if (!in) throw DataError("cannot open " + bounds_path);
    std::string line;
    std::getline(in, line);
    if (line != "bound,f1") throw DataError(bounds_path + ": not a bounds.csv file");
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const std::string name = line.substr(0, comma) + "_bound";
      const double f1 = std::stod(line.substr(comma + 1));
      for (int it = 0; it <= max_iter; ++it) {
        std::snprintf(buf, sizeof(buf), "%s\t%d\t%.6f\t%.6f\t%.6f\n", name.c_str(), it,
                      f1, f1, f1);
        out << buf;
      }
    }
  }
  std::cout << "report -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective matrix factorization with Fisher-information active learning"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", data_path, out_path = "checkpoint.tsv";
  std::string ratings_path, bc_path, init_from, groundtruth_path, selectors_arg;
  std::string results_path, bounds_path, report_out = "report.tsv";
  bool trace = false;

  auto* generate = app.add_subcommand("generate", "synthesize a dataset");
  generate->add_option("--config", config_path, "config file")->required();
  generate->add_option("--out", out_dir, "output directory");

  auto* ingest = app.add_subcommand("ingest", "build a store from raw Yelp-schema TSVs");
  ingest->add_option("--ratings", ratings_path, "ratings TSV")->required();
  ingest->add_option("--business-categories", bc_path, "business categories TSV")->required();
  ingest->add_option("--config", config_path, "config file")->required();
  ingest->add_option("--out", out_dir, "output directory");

  auto* train = app.add_subcommand("train", "fit the factor model");
  train->add_option("--data", data_path, "relations TSV")->required();
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out", out_path, "checkpoint path");
  train->add_option("--init-from", init_from, "warm-start checkpoint");

  auto* experiment = app.add_subcommand("experiment", "run an active-learning protocol");
  std::string protocol;
  experiment->add_option("protocol", protocol, "personalized | cold-start | noisy")->required();
  experiment->add_option("--data", data_path, "relations TSV")->required();
  experiment->add_option("--config", config_path, "config file")->required();
  experiment->add_option("--out", out_dir, "output directory");
  experiment->add_option("--groundtruth", groundtruth_path, "ground-truth factors TSV");
  experiment->add_option("--selectors", selectors_arg, "comma-separated selector subset");
  experiment->add_flag("--trace", trace, "also write per-trial trace.csv");

  auto* report = app.add_subcommand("report", "render results.csv to plot-ready TSV");
  report->add_option("--results", results_path, "results.csv")->required();
  report->add_option("--bounds", bounds_path, "bounds.csv");
  report->add_option("--out", report_out, "output TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir);
    if (ingest->parsed()) return cmd_ingest(ratings_path, bc_path, config_path, out_dir);
    if (train->parsed()) return cmd_train(data_path, config_path, out_path, init_from);
    if (experiment->parsed()) {
      return cmd_experiment(protocol, data_path, config_path, out_dir,
                            groundtruth_path, selectors_arg, trace);
    }
    if (report->parsed()) return cmd_report(results_path, bounds_path, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
