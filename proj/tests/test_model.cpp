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

#include <doctest.h>

#include <cmath>

#include "cmfal/model.hpp"
#include "cmfal/rng.hpp"
#include "cmfal/synthetic.hpp"

using namespace cmfal;

namespace {

Eigen::VectorXd random_vec(Rng& rng, int k, double scale = 1.0) {
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v[i] = scale * rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("sigmoid basics and symmetry") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(predict_prob(Eigen::VectorXd::Unit(3, 0), Eigen::VectorXd::Unit(3, 0)) ==
        doctest::Approx(0.7310586).epsilon(1e-7));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double s = (rng.uniform01() - 0.5) * 60.0;
    CHECK(sigmoid(s) + sigmoid(-s) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // stays finite and in (0, 1) deep in saturation
  CHECK(sigmoid(700.0) < 1.0);
  CHECK(sigmoid(-700.0) > 0.0);
  Eigen::VectorXd a(2), b(3);
  CHECK_THROWS_AS(predict_prob(a, b), DataError);
}

TEST_CASE("nll closed forms") {
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(1, 0);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(nll(1, e1, zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Eigen::VectorXd big(1);
  big << 30.0;
  CHECK(nll(1, e1, big) < 1e-12);
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(nll(-1, e1, one) == doctest::Approx(std::log1p(std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("nll equals -log predict_prob at y*s") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto pe = random_vec(rng, 4);
    const auto pu = random_vec(rng, 4);
    const int y = rng.uniform01() < 0.5 ? 1 : -1;
    const double p = sigmoid(y * pe.dot(pu));
    CHECK(nll(y, pe, pu) == doctest::Approx(-std::log(p)).epsilon(1e-12));
  }
}

TEST_CASE("grad_user closed forms and finite differences") {
  const Eigen::VectorXd phi_e = 2.0 * Eigen::VectorXd::Unit(3, 1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK((grad_user(1, phi_e, zero) + 0.5 * phi_e).norm() == doctest::Approx(0.0));
  CHECK((grad_user(-1, phi_e, zero) - 0.5 * phi_e).norm() == doctest::Approx(0.0));

  Rng rng(23);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const int k = 5;
    const auto pe = random_vec(rng, k);
    const auto pu = random_vec(rng, k);
    const int y = rng.uniform01() < 0.5 ? 1 : -1;
    const Eigen::VectorXd g = grad_user(y, pe, pu);
    for (int d = 0; d < k; ++d) {
      Eigen::VectorXd up = pu, dn = pu;
      up[d] += h;
      dn[d] -= h;
      const double fd = (nll(y, pe, up) - nll(y, pe, dn)) / (2 * h);
      CHECK(std::abs(g[d] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
    // entity gradient via role swap
    const Eigen::VectorXd ge = grad_user(y, pu, pe);
    for (int d = 0; d < k; ++d) {
      Eigen::VectorXd up = pe, dn = pe;
      up[d] += h;
      dn[d] -= h;
      const double fd = (nll(y, up, pu) - nll(y, dn, pu)) / (2 * h);
      CHECK(std::abs(ge[d] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

namespace {

Database single_pair_db() {
  Database db;
  db.registry().register_entity(EntityKind::Business, "b");
  db.registry().register_entity(EntityKind::User, "u");
  db.add_triple({Relation::R, 0, 1, 1});
  return db;
}

}  // namespace

TEST_CASE("sgd_train drives a single positive example toward 1") {
  const Database db = single_pair_db();
  Hyperparams hp;
  hp.k = 4;
  hp.lambda = 1e-4;
  hp.epochs = 4000;
  hp.eta = 0.05;
  TrainReport report;
  const LatentMatrix phi = sgd_train(db, db.triples(), hp, 3, &report);
  CHECK(predict(phi, 0, 1).probability > 0.9);
  // probability is monotone along the recorded objective descent
  for (std::size_t i = 1; i < report.objective.size(); ++i) {
    CHECK(report.objective[i] <= report.objective[i - 1] + 1e-12);
  }
}

TEST_CASE("sgd_train objective is non-increasing in at least 90% of epochs") {
  const SyntheticData data = generate_synthetic({30, 30, 10, 5, 0.25, 0.1}, 2);
  Hyperparams hp;
  hp.k = 5;
  hp.epochs = 60;
  TrainReport report;
  sgd_train(data.db, data.db.triples(), hp, 1, &report);
  int down = 0;
  for (std::size_t i = 1; i < report.objective.size(); ++i) {
    down += report.objective[i] <= report.objective[i - 1];
  }
  CHECK(report.objective.size() >= 2);
  CHECK(down >= static_cast<int>(0.9 * (report.objective.size() - 1)));
}

TEST_CASE("sgd_train is bit-deterministic and shrinks under huge lambda") {
  const SyntheticData data = generate_synthetic({10, 10, 5, 3, 0.25, 0.1}, 4);
  Hyperparams hp;
  hp.k = 3;
  hp.epochs = 30;
  const LatentMatrix a = sgd_train(data.db, data.db.triples(), hp, 5);
  const LatentMatrix b = sgd_train(data.db, data.db.triples(), hp, 5);
  CHECK(a.matrix() == b.matrix());

  Hyperparams strong = hp;
  strong.lambda = 50.0;
  const LatentMatrix small = sgd_train(data.db, data.db.triples(), strong, 5);
  CHECK(small.frobenius_norm() < 0.05 * a.frobenius_norm());

  CHECK_THROWS_AS(sgd_train(data.db, {}, hp, 5), DataError);
}

TEST_CASE("sgd_train warm start with zero epochs returns the input") {
  const SyntheticData data = generate_synthetic({5, 5, 3, 3, 0.25, 0.1}, 6);
  Hyperparams hp;
  hp.k = 3;
  hp.epochs = 10;
  const LatentMatrix trained = sgd_train(data.db, data.db.triples(), hp, 7);
  Hyperparams frozen = hp;
  frozen.epochs = 0;
  const LatentMatrix same =
      sgd_train(data.db, data.db.triples(), frozen, 123, nullptr, &trained);
  CHECK(same.matrix() == trained.matrix());
}

TEST_CASE("refit_user with a zero entity vector returns zero") {
  LatentMatrix phi(3, 2);
  phi.vec(1).setConstant(0.7);  // warm start away from the optimum
  const std::vector<std::pair<EntityId, int>> labeled = {{0, 1}};
  const Eigen::VectorXd result = refit_user(1, labeled, phi, 0.1);
  CHECK(result.norm() <= 1e-7);
}

TEST_CASE("refit_user matches a 1-d grid search") {
  // k=1, one observation (y=+1, phi_e=1), lambda=0.1
  LatentMatrix phi(1, 2);
  phi.vec(0)[0] = 1.0;
  const std::vector<std::pair<EntityId, int>> labeled = {{0, 1}};
  const Eigen::VectorXd result = refit_user(1, labeled, phi, 0.1);

  double best = 0.0, best_f = 1e18;
  for (double x = -2.0; x <= 4.0; x += 1e-4) {
    const double f = std::log1p(std::exp(-x)) + 0.1 * x * x;
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  CHECK(result[0] == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("refit_user reaches stationarity and ignores the warm start") {
  Rng rng(31);
  const int k = 6;
  LatentMatrix phi(k, 12);
  for (EntityId e = 0; e < 12; ++e) phi.vec(e) = random_vec(rng, k, 0.6);
  std::vector<std::pair<EntityId, int>> labeled;
  for (EntityId e = 0; e < 10; ++e) {
    labeled.emplace_back(e, rng.uniform01() < 0.6 ? 1 : -1);
  }
  const double lambda = 0.1;
  const Eigen::VectorXd a = refit_user(10, labeled, phi, lambda);

  // same data, different warm-start column: strict convexity
  LatentMatrix other = phi;
  other.vec(10) = random_vec(rng, k, 2.0);
  const Eigen::VectorXd c = refit_user(10, labeled, other, lambda);
  CHECK((a - c).norm() <= 1e-6);

  // gradient norm at the solution honors the contract
  Eigen::VectorXd grad = 2.0 * lambda * a;
  for (const auto& [e, y] : labeled) {
    grad += grad_user(y, phi.vec(e), a) / static_cast<double>(labeled.size());
  }
  CHECK(grad.norm() <= 1e-8);

  CHECK_THROWS_AS(refit_user(10, {}, phi, lambda), DataError);
}

TEST_CASE("f1_score closed forms") {
  const std::vector<int> all_pos = {1, 1, 1, 1};
  const std::vector<int> half = {1, 1, -1, -1};
  CHECK(f1_score(half, half) == 1.0);
  CHECK(f1_score(all_pos, half) == doctest::Approx(2.0 / 3.0));
  const std::vector<int> none = {-1, -1, -1, -1};
  CHECK(f1_score(none, half) == 0.0);
  CHECK_THROWS_AS(f1_score(std::vector<int>{1}, std::vector<int>{1, 1}), DataError);
  CHECK_THROWS_AS(f1_score(std::vector<int>{}, std::vector<int>{}), DataError);

  // invariant under a consistent permutation
  Rng rng(3);
  std::vector<int> preds, labels;
  for (int i = 0; i < 50; ++i) {
    preds.push_back(rng.uniform01() < 0.5 ? 1 : -1);
    labels.push_back(rng.uniform01() < 0.6 ? 1 : -1);
  }
  const double before = f1_score(preds, labels);
  std::vector<std::size_t> perm(50);
  for (std::size_t i = 0; i < 50; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<int> p2(50), l2(50);
  for (std::size_t i = 0; i < 50; ++i) {
    p2[i] = preds[perm[i]];
    l2[i] = labels[perm[i]];
  }
  CHECK(f1_score(p2, l2) == before);
}

TEST_CASE("prediction threshold classifies ties as negative") {
  LatentMatrix phi(2, 2);  // all zero -> probability exactly 0.5
  const Prediction p = predict(phi, 0, 1);
  CHECK(p.probability == 0.5);
  CHECK(p.label == -1);
}
