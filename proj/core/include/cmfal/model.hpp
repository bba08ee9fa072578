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

#ifndef CMFAL_MODEL_HPP
#define CMFAL_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cmfal/database.hpp"
#include "cmfal/latent.hpp"
#include "cmfal/types.hpp"

namespace cmfal {

/// Numerically stable logistic function; no overflow for |s| up to ~700.
/// The result is clamped into the open interval (0, 1).
double sigmoid(double s);

/// P[label = +1] = sigmoid(phi1 . phi2). Throws DataError on dimension
/// mismatch.
double predict_prob(Eigen::Ref<const Eigen::VectorXd> phi1,
                    Eigen::Ref<const Eigen::VectorXd> phi2);

/// Negative log likelihood -log sigmoid(y * phi_e.phi_u), evaluated in
/// log1p form so saturated scores stay finite.
double nll(int y, Eigen::Ref<const Eigen::VectorXd> phi_e,
           Eigen::Ref<const Eigen::VectorXd> phi_u);

/// d nll / d phi_u = -y * sigmoid(-y s) * phi_e. The gradient with respect
/// to phi_e is the same expression with the roles swapped.
Eigen::VectorXd grad_user(int y, Eigen::Ref<const Eigen::VectorXd> phi_e,
                          Eigen::Ref<const Eigen::VectorXd> phi_u);

struct Hyperparams {
  double lambda = 0.1;   ///< regularization weight, must be > 0
  double eta = 0.02;     ///< SGD learning rate
  int epochs = 200;
  int k = 10;
  double b_max = 10.0;   ///< projection radius realizing the compact domain

  void validate() const;
};

struct Prediction {
  double probability;
  int label;  ///< +1 iff probability > 0.5; ties classify as -1
};

Prediction predict(const LatentMatrix& phi, EntityId first, EntityId second);

struct TrainReport {
  int epochs_run = 0;
  /// Regularized objective after each epoch (sum of per-triple losses plus
  /// one lambda * ||phi||^2 penalty per observation visit).
  std::vector<double> objective;
};

/// Joint SGD over all training triples: one pass per epoch in a
/// seed-determined shuffled order, updating both endpoint vectors per
/// triple and projecting back onto the b_max ball. Vectors exist for every
/// registered entity; entities absent from the training set keep their
/// Gaussian(0, 0.01) initialization. Pass `warm_start` to continue from an
/// existing matrix instead (epochs = 0 then returns it unchanged).
/// Deterministic given the seed.
LatentMatrix sgd_train(const Database& db, std::span<const RelationTriple> train,
                       const Hyperparams& hp, std::uint64_t init_seed,
                       TrainReport* report = nullptr,
                       const LatentMatrix* warm_start = nullptr);

/// Sum-form objective the trainer descends; exposed for the objective-trace
/// oracle in tests.
double sgd_objective(const LatentMatrix& phi, std::span<const RelationTriple> train,
                     double lambda);

/// Per-user maximum likelihood refit: minimizes the mean NLL over the
/// labeled entities plus lambda * ||phi_u||^2 with every entity vector held
/// fixed. Newton with step halving, warm-started from phi_fixed's current
/// user column; the returned gradient norm is <= 1e-8 or NumericalError is
/// thrown after 100 iterations.
Eigen::VectorXd refit_user(EntityId user,
                           std::span<const std::pair<EntityId, int>> labeled,
                           const LatentMatrix& phi_fixed, double lambda);

/// F1 of the positive class; 0 when precision + recall is 0. Throws
/// DataError on length mismatch or empty input.
double f1_score(std::span<const int> predictions, std::span<const int> labels);

}  // namespace cmfal

#endif  // CMFAL_MODEL_HPP
