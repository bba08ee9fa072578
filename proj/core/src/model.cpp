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

#include "cmfal/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cmfal/rng.hpp"

namespace cmfal {

namespace {
constexpr std::uint64_t kInitStreamTag = 0x494E4954;   // init
constexpr std::uint64_t kShuffleStreamTag = 0x53485546;  // shuffle
}  // namespace

LatentMatrix LatentMatrix::gaussian_init(int k, std::size_t entity_count, double mean,
                                         double stddev, std::uint64_t seed) {
  LatentMatrix out(k, entity_count);
  Rng rng(seed);
  auto& m = out.matrix();
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
      m(row, col) = rng.gaussian(mean, stddev);
    }
  }
  return out;
}

double sigmoid(double s) {
  double p;
  if (s >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-s));
  } else {
    const double e = std::exp(s);
    p = e / (1.0 + e);
  }
  // keep the contract probability in (0, 1) even for saturated scores
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(p, lo, hi);
}

double predict_prob(Eigen::Ref<const Eigen::VectorXd> phi1,
                    Eigen::Ref<const Eigen::VectorXd> phi2) {
  if (phi1.size() != phi2.size()) {
    throw DataError("predict_prob: dimension mismatch (" +
                    std::to_string(phi1.size()) + " vs " +
                    std::to_string(phi2.size()) + ")");
  }
  return sigmoid(phi1.dot(phi2));
}

double nll(int y, Eigen::Ref<const Eigen::VectorXd> phi_e,
           Eigen::Ref<const Eigen::VectorXd> phi_u) {
  const double z = y * phi_e.dot(phi_u);
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

Eigen::VectorXd grad_user(int y, Eigen::Ref<const Eigen::VectorXd> phi_e,
                          Eigen::Ref<const Eigen::VectorXd> phi_u) {
  const double s = phi_e.dot(phi_u);
  return (-y * sigmoid(-y * s)) * phi_e;
}

void Hyperparams::validate() const {
  if (lambda <= 0.0) throw ConfigError("lambda must be > 0");
  if (eta <= 0.0) throw ConfigError("eta must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (k <= 0) throw ConfigError("k must be > 0");
  if (b_max <= 0.0) throw ConfigError("b_max must be > 0");
}

Prediction predict(const LatentMatrix& phi, EntityId first, EntityId second) {
  const double p = sigmoid(phi.dot(first, second));
  return {p, p > 0.5 ? 1 : -1};
}

double sgd_objective(const LatentMatrix& phi, std::span<const RelationTriple> train,
                     double lambda) {
  double obj = 0.0;
  for (const auto& t : train) {
    obj += nll(t.label, phi.vec(t.first), phi.vec(t.second));
    obj += 0.5 * lambda *
           (phi.vec(t.first).squaredNorm() + phi.vec(t.second).squaredNorm());
  }
  return obj;
}

LatentMatrix sgd_train(const Database& db, std::span<const RelationTriple> train,
                       const Hyperparams& hp, std::uint64_t init_seed,
                       TrainReport* report, const LatentMatrix* warm_start) {
  hp.validate();
  if (train.empty()) throw DataError("sgd_train: empty training set");
  for (const auto& t : train) {
    if (t.first >= db.registry().size() || t.second >= db.registry().size()) {
      throw DataError("sgd_train: triple references unregistered entity");
    }
  }
  if (warm_start &&
      (warm_start->k() != hp.k || warm_start->entity_count() != db.registry().size())) {
    throw DataError("sgd_train: warm start shape does not match registry/k");
  }

  LatentMatrix phi =
      warm_start ? *warm_start
                 : LatentMatrix::gaussian_init(hp.k, db.registry().size(), 0.0, 0.1,
                                               mix_seed(init_seed, kInitStreamTag));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Eigen::VectorXd g1(hp.k), g2(hp.k);
  double prev_obj = std::numeric_limits<double>::infinity();
  int epochs_run = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(init_seed, kShuffleStreamTag, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    for (const std::size_t i : order) {
      const RelationTriple& t = train[i];
      auto v1 = phi.vec(t.first);
      auto v2 = phi.vec(t.second);
      const double s = v1.dot(v2);
      const double g = -t.label * sigmoid(-t.label * s);
      // the per-visit lambda regularizer; see the trainer notes in the header
      g1 = g * v2 + hp.lambda * v1;
      g2 = g * v1 + hp.lambda * v2;
      v1 -= hp.eta * g1;
      v2 -= hp.eta * g2;
      const double n1 = v1.norm();
      if (n1 > hp.b_max) v1 *= hp.b_max / n1;
      const double n2 = v2.norm();
      if (n2 > hp.b_max) v2 *= hp.b_max / n2;
    }
    ++epochs_run;
    const double obj = sgd_objective(phi, train, hp.lambda);
    if (report) report->objective.push_back(obj);
    if (std::abs(prev_obj - obj) < 1e-6) break;
    prev_obj = obj;
  }
  if (report) report->epochs_run = epochs_run;
  return phi;
}

namespace {

double refit_objective(const Eigen::VectorXd& phi,
                       const Eigen::MatrixXd& entity_vecs,
                       const Eigen::VectorXd& labels, double lambda) {
  double data = 0.0;
  const Eigen::VectorXd scores = entity_vecs.transpose() * phi;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double z = labels[i] * scores[i];
    data += z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  return data / static_cast<double>(scores.size()) + lambda * phi.squaredNorm();
}

}  // namespace

Eigen::VectorXd refit_user(EntityId user,
                           std::span<const std::pair<EntityId, int>> labeled,
                           const LatentMatrix& phi_fixed, double lambda) {
  if (labeled.empty()) throw DataError("refit_user: empty labeled set");
  if (lambda <= 0.0) throw ConfigError("refit_user: lambda must be > 0");
  const int k = phi_fixed.k();
  const Eigen::Index n = static_cast<Eigen::Index>(labeled.size());

  Eigen::MatrixXd entity_vecs(k, n);
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    entity_vecs.col(i) = phi_fixed.vec(labeled[i].first);
    labels[i] = labeled[i].second;
  }

  Eigen::VectorXd phi = phi_fixed.vec(user);  // warm start
  constexpr int kMaxIter = 100;
  constexpr double kGradTol = 1e-8;
  double grad_norm = 0.0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd scores = entity_vecs.transpose() * phi;
    Eigen::VectorXd grad = 2.0 * lambda * phi;
    Eigen::MatrixXd hess = 2.0 * lambda * Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p_mis = sigmoid(-labels[i] * scores[i]);
      grad.noalias() += (-labels[i] * p_mis / n) * entity_vecs.col(i);
      const double w = sigmoid(scores[i]) * sigmoid(-scores[i]);
      hess.noalias() += (w / n) * (entity_vecs.col(i) * entity_vecs.col(i).transpose());
    }
    grad_norm = grad.norm();
    if (grad_norm <= kGradTol) return phi;

    const Eigen::VectorXd step = hess.llt().solve(grad);
    const double f0 = refit_objective(phi, entity_vecs, labels, lambda);
    // near the optimum the predicted decrease drops below the rounding
    // error of the objective itself; accept anything within that noise or
    // the halving loop stalls with the gradient just above tolerance
    const double accept = f0 + 1e-14 * (1.0 + std::abs(f0));
    double t = 1.0;
    Eigen::VectorXd cand = phi - step;
    for (int h = 0;
         h < 60 && refit_objective(cand, entity_vecs, labels, lambda) > accept; ++h) {
      t *= 0.5;
      cand = phi - t * step;
    }
    phi = cand;
  }
  // final check: the last step may have landed on the optimum
  Eigen::VectorXd grad = 2.0 * lambda * phi;
  const Eigen::VectorXd scores = entity_vecs.transpose() * phi;
  for (Eigen::Index i = 0; i < n; ++i) {
    grad.noalias() += (-labels[i] * sigmoid(-labels[i] * scores[i]) / n) * entity_vecs.col(i);
  }
  if (grad.norm() <= kGradTol) return phi;

  std::ostringstream msg;
  msg << "refit_user: Newton did not converge for user " << user << " after "
      << kMaxIter << " iterations (n=" << n << ", lambda=" << lambda
      << ", |grad|=" << grad.norm() << ")";
  throw NumericalError(msg.str());
}

double f1_score(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("f1_score: length mismatch");
  }
  if (predictions.empty()) throw DataError("f1_score: empty input");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    else if (predictions[i] == 1 && labels[i] != 1) ++fp;
    else if (predictions[i] != 1 && labels[i] == 1) ++fn;
  }
  const double precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace cmfal
