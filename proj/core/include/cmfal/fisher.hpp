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

#ifndef CMFAL_FISHER_HPP
#define CMFAL_FISHER_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cmfal/latent.hpp"
#include "cmfal/types.hpp"

namespace cmfal {

/// Question-selection strategies. The first three share the trace
/// machinery below; the rest are the comparison baselines.
enum class SelectorKind {
  Fisher,
  ApproxAInverse,
  ApproxMaxTrace,
  Uncertainty,
  MaxModelChange,
  MinModelChange,
  Random,
};

const char* selector_name(SelectorKind kind);
SelectorKind selector_from_name(const std::string& name);

/// k x k information matrix averaged over an entity set.
struct FisherMatrix {
  Eigen::MatrixXd matrix;
  std::size_t count = 0;
};

struct SelectionResult {
  std::vector<EntityId> chosen;
  double objective_value = 0.0;
  SelectorKind strategy = SelectorKind::Fisher;
};

/// Per-observation Hessian of the NLL with respect to phi_u:
///   H(phi_e, phi_u) = sigmoid(s) sigmoid(-s) phi_e phi_e^T,  s = phi_e.phi_u.
/// Rank <= 1, PSD, and independent of the observed label.
Eigen::MatrixXd hessian_term(Eigen::Ref<const Eigen::VectorXd> phi_e,
                             Eigen::Ref<const Eigen::VectorXd> phi_u);

/// Average of hessian_term over the entity set. Throws DataError on an
/// empty set.
FisherMatrix fisher_info(std::span<const EntityId> entities, const LatentMatrix& phi,
                         EntityId user);

/// Tr((I_Q + lambda I)^-1 I_S) with averaged information matrices; the
/// empty question set contributes the zero matrix. Computed through an LLT
/// factorization, never an explicit inverse.
double trace_objective(std::span<const EntityId> question_set,
                       std::span<const EntityId> pool, const LatentMatrix& phi,
                       EntityId user, double lambda);

/// Sherman-Morrison rank-one update: (A + w v v^T)^-1 from A^-1.
/// Throws NumericalError when the denominator falls below 1e-14.
Eigen::MatrixXd incremental_inverse_update(const Eigen::MatrixXd& a_inv,
                                           Eigen::Ref<const Eigen::VectorXd> v,
                                           double w);

/// Greedy forward selection of M pool entities minimizing the trace
/// criterion. Maintains A = sum_{e in Q} H_e + M lambda I and scores each
/// candidate with a rank-one inverse update in O(k^2). Candidates may be
/// scored against a wider reference set than the askable pool (the user's
/// full unlabeled set); pass it as `target` — empty means target = pool.
/// Ties break toward the lowest EntityId. The reported objective is
/// rescaled to the averaged form M * Tr((sum H + M lambda I)^-1 I_target).
SelectionResult select_fisher(std::span<const EntityId> pool, int m,
                              const LatentMatrix& phi, EntityId user, double lambda,
                              std::span<const EntityId> target = {});

/// The two cheaper surrogates: ApproxAInverse greedily minimizes
/// Tr((I_Q + lambda I)^-1); ApproxMaxTrace maximizes Tr(I_Q + lambda I),
/// which reduces to picking the top-M entities by w_e ||phi_e||^2.
SelectionResult select_approx(std::span<const EntityId> pool, int m,
                              const LatentMatrix& phi, EntityId user, double lambda,
                              SelectorKind variant);

}  // namespace cmfal

#endif  // CMFAL_FISHER_HPP
