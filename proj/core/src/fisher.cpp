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

#include "cmfal/fisher.hpp"

#include <algorithm>
#include <limits>

#include "cmfal/model.hpp"

namespace cmfal {

const char* selector_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Fisher:         return "fisher";
    case SelectorKind::ApproxAInverse: return "a_inverse";
    case SelectorKind::ApproxMaxTrace: return "max_trace";
    case SelectorKind::Uncertainty:    return "uncertainty";
    case SelectorKind::MaxModelChange: return "max_model_change";
    case SelectorKind::MinModelChange: return "min_model_change";
    case SelectorKind::Random:         return "random";
  }
  return "?";
}

SelectorKind selector_from_name(const std::string& name) {
  if (name == "fisher") return SelectorKind::Fisher;
  if (name == "a_inverse") return SelectorKind::ApproxAInverse;
  if (name == "max_trace") return SelectorKind::ApproxMaxTrace;
  if (name == "uncertainty") return SelectorKind::Uncertainty;
  if (name == "max_model_change") return SelectorKind::MaxModelChange;
  if (name == "min_model_change") return SelectorKind::MinModelChange;
  if (name == "random") return SelectorKind::Random;
  throw ConfigError("unknown selector: '" + name + "'");
}

Eigen::MatrixXd hessian_term(Eigen::Ref<const Eigen::VectorXd> phi_e,
                             Eigen::Ref<const Eigen::VectorXd> phi_u) {
  if (phi_e.size() != phi_u.size()) {
    throw DataError("hessian_term: dimension mismatch");
  }
  const double s = phi_e.dot(phi_u);
  const double w = sigmoid(s) * sigmoid(-s);
  return w * (phi_e * phi_e.transpose());
}

FisherMatrix fisher_info(std::span<const EntityId> entities, const LatentMatrix& phi,
                         EntityId user) {
  if (entities.empty()) throw DataError("fisher_info: empty entity set");
  const int k = phi.k();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, k);
  const auto phi_u = phi.vec(user);
  for (EntityId e : entities) {
    const auto phi_e = phi.vec(e);
    const double s = phi_e.dot(phi_u);
    const double w = sigmoid(s) * sigmoid(-s);
    sum.noalias() += w * (phi_e * phi_e.transpose());
  }
  sum /= static_cast<double>(entities.size());
  return FisherMatrix{std::move(sum), entities.size()};
}

double trace_objective(std::span<const EntityId> question_set,
                       std::span<const EntityId> pool, const LatentMatrix& phi,
                       EntityId user, double lambda) {
  if (lambda <= 0.0) throw ConfigError("trace_objective: lambda must be > 0");
  const int k = phi.k();
  Eigen::MatrixXd iq = Eigen::MatrixXd::Zero(k, k);
  if (!question_set.empty()) iq = fisher_info(question_set, phi, user).matrix;
  iq.diagonal().array() += lambda;
  const Eigen::MatrixXd is = fisher_info(pool, phi, user).matrix;
  // Tr(A^-1 B) via the SPD solve of A X = B
  return iq.llt().solve(is).trace();
}

Eigen::MatrixXd incremental_inverse_update(const Eigen::MatrixXd& a_inv,
                                           Eigen::Ref<const Eigen::VectorXd> v,
                                           double w) {
  const Eigen::VectorXd av = a_inv * v;
  const double denom = 1.0 + w * v.dot(av);
  if (denom <= 1e-14) {
    throw NumericalError("incremental_inverse_update: denominator " +
                         std::to_string(denom) + " <= 1e-14");
  }
  return a_inv - (w / denom) * (av * av.transpose());
}

namespace {

struct Candidate {
  EntityId id;
  double weight;       // sigmoid(s) sigmoid(-s)
  Eigen::VectorXd vec;
};

std::vector<Candidate> gather_candidates(std::span<const EntityId> pool,
                                         const LatentMatrix& phi, EntityId user) {
  std::vector<Candidate> out;
  out.reserve(pool.size());
  const auto phi_u = phi.vec(user);
  for (EntityId e : pool) {
    const Eigen::VectorXd v = phi.vec(e);
    const double s = v.dot(phi_u);
    out.push_back({e, sigmoid(s) * sigmoid(-s), v});
  }
  return out;
}

void check_selection_args(std::span<const EntityId> pool, int m) {
  if (m <= 0) throw DataError("selection: M must be positive");
  if (static_cast<std::size_t>(m) > pool.size()) {
    throw DataError("selection: M=" + std::to_string(m) + " exceeds pool size " +
                    std::to_string(pool.size()));
  }
}

/// Shared greedy loop: min Tr((A + H_e)^-1 * Target) where A starts at
/// M*lambda*I and accumulates chosen Hessians. `target` is the averaged
/// information matrix the criterion traces against (I_S, or the identity
/// for the A-inverse surrogate).
SelectionResult greedy_trace_min(std::span<const EntityId> pool, int m,
                                 const LatentMatrix& phi, EntityId user,
                                 double lambda, const Eigen::MatrixXd& target,
                                 SelectorKind strategy) {
  const int k = phi.k();
  auto candidates = gather_candidates(pool, phi, user);
  Eigen::MatrixXd a_inv =
      Eigen::MatrixXd::Identity(k, k) / (static_cast<double>(m) * lambda);

  SelectionResult result;
  result.strategy = strategy;
  result.chosen.reserve(m);
  for (int step = 0; step < m; ++step) {
    // Tr((A + w vv')^-1 T) = Tr(A^-1 T) - w v' A^-1 T A^-1 v / (1 + w v' A^-1 v)
    const Eigen::MatrixXd b = a_inv * target * a_inv;
    const double base = (a_inv * target).trace();
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      const double denom = 1.0 + c.weight * c.vec.dot(a_inv * c.vec);
      const double val = base - c.weight * c.vec.dot(b * c.vec) / denom;
      if (val < best_val ||
          (val == best_val && c.id < candidates[best_idx].id)) {
        best_val = val;
        best_idx = i;
      }
    }
    const Candidate picked = std::move(candidates[best_idx]);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best_idx));
    a_inv = incremental_inverse_update(a_inv, picked.vec, picked.weight);
    result.chosen.push_back(picked.id);
    result.objective_value = best_val;
  }
  // rescale the sum-form value to the averaged criterion
  result.objective_value *= static_cast<double>(m);
  return result;
}

}  // namespace

SelectionResult select_fisher(std::span<const EntityId> pool, int m,
                              const LatentMatrix& phi, EntityId user, double lambda,
                              std::span<const EntityId> target) {
  check_selection_args(pool, m);
  if (lambda <= 0.0) throw ConfigError("select_fisher: lambda must be > 0");
  const auto& score_set = target.empty() ? pool : target;
  const Eigen::MatrixXd is = fisher_info(score_set, phi, user).matrix;
  return greedy_trace_min(pool, m, phi, user, lambda, is, SelectorKind::Fisher);
}

SelectionResult select_approx(std::span<const EntityId> pool, int m,
                              const LatentMatrix& phi, EntityId user, double lambda,
                              SelectorKind variant) {
  check_selection_args(pool, m);
  if (variant == SelectorKind::ApproxAInverse) {
    const Eigen::MatrixXd identity =
        Eigen::MatrixXd::Identity(phi.k(), phi.k());
    return greedy_trace_min(pool, m, phi, user, lambda, identity,
                            SelectorKind::ApproxAInverse);
  }
  if (variant != SelectorKind::ApproxMaxTrace) {
    throw ConfigError("select_approx: variant must be a_inverse or max_trace");
  }
  // Tr(H_e) = w_e ||phi_e||^2, so maximizing the trace is a top-M scan.
  auto candidates = gather_candidates(pool, phi, user);
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    const double sa = a.weight * a.vec.squaredNorm();
    const double sb = b.weight * b.vec.squaredNorm();
    if (sa != sb) return sa > sb;
    return a.id < b.id;
  });
  SelectionResult result;
  result.strategy = SelectorKind::ApproxMaxTrace;
  double trace_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    result.chosen.push_back(candidates[i].id);
    trace_sum += candidates[i].weight * candidates[i].vec.squaredNorm();
  }
  // averaged form, Tr(I_Q + lambda I)
  result.objective_value =
      trace_sum / static_cast<double>(m) + static_cast<double>(phi.k()) * lambda;
  return result;
}

}  // namespace cmfal
