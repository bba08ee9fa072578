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

#ifndef CMFAL_LATENT_HPP
#define CMFAL_LATENT_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "cmfal/types.hpp"

namespace cmfal {

/// The k x |E| factor matrix: one shared k-vector per registered entity.
/// A trained matrix is an immutable snapshot; refits copy single columns
/// out rather than mutating it.
class LatentMatrix {
 public:
  LatentMatrix() : k_(0) {}
  LatentMatrix(int k, std::size_t entity_count)
      : k_(k), data_(Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(entity_count))) {}

  int k() const { return k_; }
  std::size_t entity_count() const { return static_cast<std::size_t>(data_.cols()); }

  Eigen::Ref<const Eigen::VectorXd> vec(EntityId id) const { return data_.col(id); }
  Eigen::Ref<Eigen::VectorXd> vec(EntityId id) { return data_.col(id); }

  double dot(EntityId a, EntityId b) const { return data_.col(a).dot(data_.col(b)); }

  double frobenius_norm() const { return data_.norm(); }

  const Eigen::MatrixXd& matrix() const { return data_; }
  Eigen::MatrixXd& matrix() { return data_; }

  /// All coordinates i.i.d. Gaussian(mean, stddev^2) from a dedicated
  /// stream; column-major order so the draw sequence is well defined.
  static LatentMatrix gaussian_init(int k, std::size_t entity_count, double mean,
                                    double stddev, std::uint64_t seed);

 private:
  int k_;
  Eigen::MatrixXd data_;
};

}  // namespace cmfal

#endif  // CMFAL_LATENT_HPP
