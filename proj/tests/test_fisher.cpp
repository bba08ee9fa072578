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

#include <algorithm>
#include <cmath>
#include <vector>

#include "cmfal/fisher.hpp"
#include "cmfal/model.hpp"
#include "cmfal/rng.hpp"

using namespace cmfal;

namespace {

LatentMatrix random_latent(Rng& rng, int k, std::size_t n, double scale = 0.8) {
  LatentMatrix phi(k, n);
  for (std::size_t e = 0; e < n; ++e) {
    for (int d = 0; d < k; ++d) phi.vec(static_cast<EntityId>(e))[d] = scale * rng.gaussian();
  }
  return phi;
}

std::vector<EntityId> id_range(EntityId begin, EntityId end) {
  std::vector<EntityId> out;
  for (EntityId e = begin; e < end; ++e) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("hessian_term closed forms") {
  Eigen::VectorXd phi_e(2), zero(2);
  phi_e << 1.0, 2.0;
  zero.setZero();
  const Eigen::MatrixXd h = hessian_term(phi_e, zero);
  CHECK((h - 0.25 * phi_e * phi_e.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(hessian_term(zero, phi_e).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hessian_term is label independent, PSD, and matches gradient differences") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const int k = 4;
    LatentMatrix phi = random_latent(rng, k, 2);
    const Eigen::VectorXd pe = phi.vec(0), pu = phi.vec(1);

    // per-label analytic second derivative: sigma(ys) sigma(-ys) phi phi^T
    const double s = pe.dot(pu);
    const Eigen::MatrixXd h_pos = sigmoid(s) * sigmoid(-s) * (pe * pe.transpose());
    const Eigen::MatrixXd h_neg = sigmoid(-s) * sigmoid(s) * (pe * pe.transpose());
    const Eigen::MatrixXd h = hessian_term(pe, pu);
    CHECK((h_pos - h_neg).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((h - h_pos).cwiseAbs().maxCoeff() <= 1e-12);

    // PSD
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

    // finite differences of grad_user, for both labels
    const double step = 1e-6;
    for (const int y : {1, -1}) {
      for (int d = 0; d < k; ++d) {
        Eigen::VectorXd up = pu, dn = pu;
        up[d] += step;
        dn[d] -= step;
        const Eigen::VectorXd col =
            (grad_user(y, pe, up) - grad_user(y, pe, dn)) / (2 * step);
        CHECK((col - h.col(d)).cwiseAbs().maxCoeff() <= 1e-5);
      }
    }
  }
}

TEST_CASE("fisher_info averages hessian terms") {
  Rng rng(13);
  LatentMatrix phi = random_latent(rng, 3, 6);
  const EntityId user = 5;

  const std::vector<EntityId> singleton = {2};
  const FisherMatrix single = fisher_info(singleton, phi, user);
  CHECK((single.matrix - hessian_term(phi.vec(2), phi.vec(user))).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK(single.count == 1);

  const auto ids = id_range(0, 5);
  const FisherMatrix avg = fisher_info(ids, phi, user);
  Eigen::MatrixXd naive = Eigen::MatrixXd::Zero(3, 3);
  for (EntityId e : ids) naive += hessian_term(phi.vec(e), phi.vec(user));
  naive /= 5.0;
  CHECK((avg.matrix - naive).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((avg.matrix - avg.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(fisher_info({}, phi, user), DataError);
}

TEST_CASE("trace_objective closed forms and 2x2 inversion oracle") {
  // two orthogonal entities with ||phi||^2 = 8 at phi_u = 0 average to I
  LatentMatrix phi(2, 3);
  phi.vec(0) << std::sqrt(8.0), 0.0;
  phi.vec(1) << 0.0, std::sqrt(8.0);
  phi.vec(2).setZero();  // the user
  const std::vector<EntityId> pool = {0, 1};
  CHECK(trace_objective(pool, pool, phi, 2, 1e-12) == doctest::Approx(2.0).epsilon(1e-6));

  // empty question set with lambda = 1: Tr(I_S)
  const double tr_is = fisher_info(pool, phi, 2).matrix.trace();
  CHECK(trace_objective({}, pool, phi, 2, 1.0) == doctest::Approx(tr_is).epsilon(1e-12));

  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    LatentMatrix inst = random_latent(rng, 2, 7);
    const std::vector<EntityId> q = {0, 1, 2};
    const std::vector<EntityId> s = {0, 1, 2, 3, 4, 5};
    const double lambda = 0.1;
    const Eigen::MatrixXd iq =
        fisher_info(q, inst, 6).matrix + lambda * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd is = fisher_info(s, inst, 6).matrix;
    // explicit 2x2 inverse
    const double det = iq(0, 0) * iq(1, 1) - iq(0, 1) * iq(1, 0);
    Eigen::MatrixXd inv(2, 2);
    inv << iq(1, 1), -iq(0, 1), -iq(1, 0), iq(0, 0);
    inv /= det;
    CHECK(trace_objective(q, s, inst, 6, lambda) ==
          doctest::Approx((inv * is).trace()).epsilon(1e-10));
  }
}

TEST_CASE("incremental_inverse_update closed forms and random SPD oracle") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  CHECK((incremental_inverse_update(eye, zero, 1.0) - eye).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(4, 0);
  const Eigen::MatrixXd updated = incremental_inverse_update(eye, e1, 1.0);
  Eigen::VectorXd expected_diag(4);
  expected_diag << 0.5, 1.0, 1.0, 1.0;
  CHECK((updated.diagonal() - expected_diag).cwiseAbs().maxCoeff() <= 1e-15);

  Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXd m(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = rng.gaussian();
    const Eigen::MatrixXd a = m * m.transpose() + Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd a_inv = a.llt().solve(Eigen::MatrixXd::Identity(4, 4));
    Eigen::VectorXd v(4);
    for (int d = 0; d < 4; ++d) v[d] = rng.gaussian();
    const double w = 0.1 + rng.uniform01();
    const Eigen::MatrixXd direct =
        (a + w * v * v.transpose()).llt().solve(Eigen::MatrixXd::Identity(4, 4));
    const Eigen::MatrixXd fast = incremental_inverse_update(a_inv, v, w);
    CHECK((direct - fast).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("select_fisher picks the largest scalar when the user is uninformative") {
  LatentMatrix phi(1, 4);
  phi.vec(0)[0] = 0.1;
  phi.vec(1)[0] = 0.5;
  phi.vec(2)[0] = 2.0;
  phi.vec(3)[0] = 0.0;  // user
  const std::vector<EntityId> pool = {0, 1, 2};
  const SelectionResult r = select_fisher(pool, 1, phi, 3, 0.1);
  REQUIRE(r.chosen.size() == 1);
  CHECK(r.chosen[0] == 2);
}

TEST_CASE("select_fisher at M=1 equals exhaustive singleton search") {
  Rng rng(23);
  for (int inst = 0; inst < 50; ++inst) {
    const int k = 3;
    const std::size_t n = 9;
    LatentMatrix phi = random_latent(rng, k, n + 1);
    const EntityId user = static_cast<EntityId>(n);
    const auto pool = id_range(0, static_cast<EntityId>(n));
    const double lambda = 0.1;

    const SelectionResult greedy = select_fisher(pool, 1, phi, user, lambda);
    EntityId best = pool[0];
    double best_val = 1e300;
    for (EntityId e : pool) {
      const std::vector<EntityId> q = {e};
      const double val = trace_objective(q, pool, phi, user, lambda);
      if (val < best_val) {
        best_val = val;
        best = e;
      }
    }
    CHECK(greedy.chosen[0] == best);
    CHECK(greedy.objective_value == doctest::Approx(best_val).epsilon(1e-8));
  }
}

TEST_CASE("select_fisher with the whole pool matches trace_objective") {
  Rng rng(29);
  LatentMatrix phi = random_latent(rng, 3, 7);
  const auto pool = id_range(0, 6);
  const SelectionResult all = select_fisher(pool, 6, phi, 6, 0.1);
  CHECK(all.chosen.size() == 6);
  auto sorted = all.chosen;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == pool);
  CHECK(all.objective_value ==
        doctest::Approx(trace_objective(pool, pool, phi, 6, 0.1)).epsilon(1e-8));
}

TEST_CASE("information monotonicity: growing Q never raises the criterion") {
  Rng rng(31);
  for (int inst = 0; inst < 10; ++inst) {
    const int k = 3;
    LatentMatrix phi = random_latent(rng, k, 11);
    const EntityId user = 10;
    const auto pool = id_range(0, 10);
    const int m = 6;
    const double lambda_sum = m * 0.1;

    const Eigen::MatrixXd is = fisher_info(pool, phi, user).matrix;
    Eigen::MatrixXd a = lambda_sum * Eigen::MatrixXd::Identity(k, k);
    double prev = a.llt().solve(is).trace();
    std::vector<EntityId> order = pool;
    rng.shuffle(order);
    for (int step = 0; step < m; ++step) {
      a += hessian_term(phi.vec(order[static_cast<std::size_t>(step)]), phi.vec(user));
      const double cur = a.llt().solve(is).trace();
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("scaling the target information leaves the greedy choice unchanged") {
  // phi_u = 0 keeps every weight at 0.25, so doubling the target vectors
  // scales I_S by exactly 4 (a power of two, exact in floating point)
  Rng rng(37);
  const int k = 3;
  LatentMatrix phi = random_latent(rng, k, 19);
  const EntityId user = 18;
  phi.vec(user).setZero();
  const auto pool = id_range(0, 9);
  const auto target = id_range(9, 18);

  const SelectionResult base = select_fisher(pool, 3, phi, user, 0.1, target);
  LatentMatrix scaled_phi = phi;
  for (EntityId e : target) scaled_phi.vec(e) *= 2.0;
  const SelectionResult scaled = select_fisher(pool, 3, scaled_phi, user, 0.1, target);
  CHECK(base.chosen == scaled.chosen);
  CHECK(scaled.objective_value == doctest::Approx(4.0 * base.objective_value).epsilon(1e-12));
}

TEST_CASE("approx variants: max-trace reductions") {
  // phi_u = 0 makes every weight 0.25, so max-trace ranks by ||phi_e||^2
  LatentMatrix phi(2, 4);
  phi.vec(0) << 1.0, 0.0;
  phi.vec(1) << 2.0, 0.0;
  phi.vec(2) << 0.0, 3.0;
  phi.vec(3).setZero();
  const std::vector<EntityId> pool = {0, 1, 2};
  const SelectionResult top2 =
      select_approx(pool, 2, phi, 3, 0.1, SelectorKind::ApproxMaxTrace);
  CHECK(top2.chosen == std::vector<EntityId>{2, 1});

  Rng rng(41);
  for (int inst = 0; inst < 20; ++inst) {
    LatentMatrix m = random_latent(rng, 3, 7);
    const auto p6 = id_range(0, 6);
    const SelectionResult greedy =
        select_approx(p6, 2, m, 6, 0.1, SelectorKind::ApproxMaxTrace);
    // brute force over all C(6,2) subsets by Tr(I_Q)
    double best = -1.0;
    std::vector<EntityId> best_set;
    for (EntityId a = 0; a < 6; ++a) {
      for (EntityId b = a + 1; b < 6; ++b) {
        const std::vector<EntityId> q = {a, b};
        const double tr = fisher_info(q, m, 6).matrix.trace();
        if (tr > best) {
          best = tr;
          best_set = q;
        }
      }
    }
    auto got = greedy.chosen;
    std::sort(got.begin(), got.end());
    CHECK(got == best_set);
  }
}

TEST_CASE("a-inverse variant coincides with fisher when the target is isotropic") {
  // orthogonal equal-norm pool at phi_u = 0 gives I_S proportional to I
  LatentMatrix phi(2, 5);
  phi.vec(0) << 1.5, 0.0;
  phi.vec(1) << 0.0, 1.5;
  phi.vec(2) << 0.9, 0.0;
  phi.vec(3) << 0.0, 0.4;
  phi.vec(4).setZero();
  const std::vector<EntityId> pool = {0, 1, 2, 3};
  const SelectionResult f = select_fisher(pool, 2, phi, 4, 0.1, std::vector<EntityId>{0, 1});
  const SelectionResult a = select_approx(pool, 2, phi, 4, 0.1, SelectorKind::ApproxAInverse);
  CHECK(f.chosen == a.chosen);
}

TEST_CASE("selection argument validation") {
  LatentMatrix phi(2, 3);
  const std::vector<EntityId> pool = {0, 1};
  CHECK_THROWS_AS(select_fisher(pool, 3, phi, 2, 0.1), DataError);
  CHECK_THROWS_AS(select_fisher(pool, 0, phi, 2, 0.1), DataError);
  CHECK_THROWS_AS(select_fisher(pool, 1, phi, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(select_approx(pool, 3, phi, 2, 0.1, SelectorKind::ApproxMaxTrace),
                  DataError);
}

TEST_CASE("greedy chain of rank-one updates stays close to direct factorization") {
  Rng rng(43);
  const int k = 5;
  LatentMatrix phi = random_latent(rng, k, 26);
  const EntityId user = 25;
  const auto pool = id_range(0, 25);
  const int m = 20;
  const SelectionResult r = select_fisher(pool, m, phi, user, 0.1);

  Eigen::MatrixXd a = m * 0.1 * Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd a_inv_incr = Eigen::MatrixXd::Identity(k, k) / (m * 0.1);
  for (EntityId e : r.chosen) {
    const Eigen::VectorXd v = phi.vec(e);
    const double s = v.dot(phi.vec(user));
    const double w = sigmoid(s) * sigmoid(-s);
    a += w * v * v.transpose();
    a_inv_incr = incremental_inverse_update(a_inv_incr, v, w);
  }
  const Eigen::MatrixXd direct = a.llt().solve(Eigen::MatrixXd::Identity(k, k));
  CHECK((direct - a_inv_incr).cwiseAbs().maxCoeff() <= 1e-8);
}
