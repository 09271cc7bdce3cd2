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

#include "cmlearn/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cmlearn/error.hpp"

namespace cmlearn {

ConstraintModel::ConstraintModel(const Eigen::MatrixXd& lambda) {
  if (lambda.cols() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "selection matrix has no columns");
  }
  if (!lambda.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "selection matrix is not finite");
  }
  std::vector<int> keep;
  for (int i = 0; i < lambda.rows(); ++i) {
    if (lambda.row(i).cwiseAbs().maxCoeff() > 0.0) keep.push_back(i);
  }
  if (keep.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "selection matrix has only zero rows");
  }
  if (static_cast<int>(keep.size()) > lambda.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "more constraint rows than features");
  }
  lambda_.resize(static_cast<Eigen::Index>(keep.size()), lambda.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) lambda_.row(i) = lambda.row(keep[i]);
}

ConstraintModel ConstraintModel::Preset(const SerialChain& chain, std::string_view id) {
  const bool planar = chain.kind() == ChainKind::kPlanar;
  std::vector<int> rows;
  std::string_view rest = id;
  while (!rest.empty()) {
    if (rest.front() == ',' || rest.front() == '_') {
      rest.remove_prefix(1);
    } else if (planar && rest.starts_with("theta")) {
      rows.push_back(2);
      rest.remove_prefix(5);
    } else if (rest.front() == 'x' || rest.front() == 'y') {
      rows.push_back(rest.front() == 'x' ? 0 : 1);
      rest.remove_prefix(1);
    } else if (!planar && rest.front() == 'z') {
      rows.push_back(2);
      rest.remove_prefix(1);
    } else {
      throw Error(ErrorCode::kConfig, "unknown constraint id '" + std::string(id) + "'");
    }
  }
  std::sort(rows.begin(), rows.end());
  if (rows.empty() || std::adjacent_find(rows.begin(), rows.end()) != rows.end()) {
    throw Error(ErrorCode::kConfig, "malformed constraint id '" + std::string(id) + "'");
  }
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                 chain.task_dim());
  for (std::size_t i = 0; i < rows.size(); ++i) lambda(static_cast<Eigen::Index>(i), rows[i]) = 1.0;
  return ConstraintModel(lambda);
}

ConstraintModel ConstraintModel::Normalized() const {
  Eigen::MatrixXd rows = lambda_;
  rows.rowwise().normalize();
  return ConstraintModel(rows);
}

double MatlabLikeThreshold(int rows, int cols, double sigma_max) {
  const double ulp =
      std::nextafter(sigma_max, std::numeric_limits<double>::infinity()) - sigma_max;
  return static_cast<double>(std::max(rows, cols)) * ulp;
}

Eigen::MatrixXd Pseudoinverse(const Eigen::MatrixXd& a, const PinvPolicy& policy) {
  if (a.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;

  double cutoff = 0.0;
  if (policy.mode == PinvMode::kPlain) {
    if (!(sigma_max > 0.0)) {
      throw Error(ErrorCode::kSingularConstraint, "pseudoinverse of an all-zero constraint");
    }
  } else {
    cutoff = policy.threshold_rule == ThresholdRule::kFixed
                 ? policy.fixed_threshold
                 : MatlabLikeThreshold(static_cast<int>(a.rows()),
                                       static_cast<int>(a.cols()), sigma_max);
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const bool keep = policy.mode == PinvMode::kPlain ? sigma[i] > 0.0 : sigma[i] > cutoff;
    if (keep) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd NullspaceProjector(const Eigen::MatrixXd& a, const PinvPolicy& policy) {
  const Eigen::MatrixXd pinv = Pseudoinverse(a, policy);
  return Eigen::MatrixXd::Identity(a.cols(), a.cols()) - pinv * a;
}

Eigen::MatrixXd ConstraintMatrix(const ConstraintModel& model, const SerialChain& chain,
                                 const JointState& q) {
  if (model.feature_dim() != chain.task_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "selection width " + std::to_string(model.feature_dim()) +
                    " does not match task dimension " + std::to_string(chain.task_dim()));
  }
  return model.lambda() * chain.Jacobian(q);
}

double SqrtGramDeterminant(const Eigen::MatrixXd& gram) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  double det;
  if (llt.info() == Eigen::Success) {
    const double p = llt.matrixLLT().diagonal().prod();
    det = p * p;
  } else {
    det = gram.partialPivLu().determinant();
  }
  if (det < 0.0) {
    if (det < -1e-12) {
      throw Error(ErrorCode::kNumericalDet,
                  "Gram determinant " + std::to_string(det) + " is negative");
    }
    det = 0.0;
  }
  return std::sqrt(det);
}

double Manipulability(const ConstraintModel& model, const SerialChain& chain,
                      const JointState& q) {
  const Eigen::MatrixXd a = ConstraintMatrix(model, chain, q);
  return SqrtGramDeterminant(a * a.transpose());
}

}  // namespace cmlearn
