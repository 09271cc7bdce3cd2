// Copyright 2026 The cmlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "cmlearn/chains.hpp"

namespace cmlearn {

// A(q) = Lambda * Phi(q) with Phi(q) := J(q). Lambda is k x task_dim.
//
// All-zero rows of the supplied selection are dropped on construction, so
// a 3x3 selection with one zero row becomes an effective 2x3 constraint and
// the Gram matrix A A^T stays nonsingular away from kinematic singularities.
class ConstraintModel {
 public:
  explicit ConstraintModel(const Eigen::MatrixXd& lambda);

  // Coordinate selection by name: "xy", "xtheta", "ytheta" on planar
  // chains, "x", "xz", ... on spatial ones. Rows are unit coordinate vectors.
  static ConstraintModel Preset(const SerialChain& chain, std::string_view id);

  const Eigen::MatrixXd& lambda() const noexcept { return lambda_; }
  int k() const noexcept { return static_cast<int>(lambda_.rows()); }
  int feature_dim() const noexcept { return static_cast<int>(lambda_.cols()); }

  // Same row space with every row scaled to unit length.
  ConstraintModel Normalized() const;

 private:
  Eigen::MatrixXd lambda_;
};

enum class PinvMode { kPlain, kTruncate };
enum class ThresholdRule { kMatlabLike, kFixed };

struct PinvPolicy {
  PinvMode mode = PinvMode::kTruncate;
  ThresholdRule threshold_rule = ThresholdRule::kMatlabLike;
  double fixed_threshold = 0.0;

  static PinvPolicy Plain() { return {PinvMode::kPlain, ThresholdRule::kMatlabLike, 0.0}; }
  static PinvPolicy Truncate() { return {}; }
};

// max(rows, cols) * ulp(sigma_max): the spacing between sigma_max and the
// next larger double, scaled by the larger matrix dimension.
double MatlabLikeThreshold(int rows, int cols, double sigma_max);

// SVD pseudoinverse. Plain inverts every nonzero singular value with no
// floor; Truncate zeroes reciprocals of singular values <= threshold.
// Throws SingularConstraint for an all-zero matrix in Plain mode.
Eigen::MatrixXd Pseudoinverse(const Eigen::MatrixXd& a, const PinvPolicy& policy);

// N = I - A^+ A.
Eigen::MatrixXd NullspaceProjector(const Eigen::MatrixXd& a, const PinvPolicy& policy);

// Lambda * J(q). Throws DimensionMismatch if Lambda's width differs from the
// chain's task dimension.
Eigen::MatrixXd ConstraintMatrix(const ConstraintModel& model, const SerialChain& chain,
                                 const JointState& q);

// sqrt(det(G)) for a symmetric positive semidefinite Gram matrix G. Uses
// Cholesky when it succeeds, LU otherwise; determinants in [-1e-12, 0) are
// treated as round-off and clamped, anything lower throws NumericalDet.
double SqrtGramDeterminant(const Eigen::MatrixXd& gram);

// Manipulability index sqrt(det(A A^T)) of the constraint at q.
double Manipulability(const ConstraintModel& model, const SerialChain& chain,
                      const JointState& q);

}  // namespace cmlearn
