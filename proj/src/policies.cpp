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

#include "cmlearn/policies.hpp"

#include <string>

#include "cmlearn/error.hpp"

namespace cmlearn {

std::string_view NullPolicyName(NullPolicyKind kind) {
  switch (kind) {
    case NullPolicyKind::kZero: return "zero";
    case NullPolicyKind::kPointAttractor: return "point_attractor";
    case NullPolicyKind::kManipGradient: return "manip_gradient";
  }
  return "zero";
}

NullPolicyKind ParseNullPolicyKind(std::string_view name) {
  if (name == "zero") return NullPolicyKind::kZero;
  if (name == "point_attractor") return NullPolicyKind::kPointAttractor;
  if (name == "manip_gradient") return NullPolicyKind::kManipGradient;
  throw Error(ErrorCode::kConfig, "unknown null policy '" + std::string(name) + "'");
}

NullPolicy NullPolicy::PointAttractor(JointState psi_star, double alpha) {
  if (!psi_star.allFinite()) throw Error(ErrorCode::kInvalidArgument, "psi_star not finite");
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  NullPolicy p;
  p.kind = NullPolicyKind::kPointAttractor;
  p.psi_star = std::move(psi_star);
  p.alpha = alpha;
  return p;
}

NullPolicy NullPolicy::ManipGradient(std::optional<ConstraintModel> model, double alpha,
                                     double grad_step) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  if (!(grad_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "h must be positive");
  NullPolicy p;
  p.kind = NullPolicyKind::kManipGradient;
  p.alpha = alpha;
  p.grad_step = grad_step;
  p.gradient_model = std::move(model);
  return p;
}

Eigen::VectorXd TaskError(const SerialChain& chain, const TaskPose& target,
                          const TaskPose& current) {
  if (target.size() != chain.task_dim() || current.size() != chain.task_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "task pose has the wrong dimension");
  }
  Eigen::VectorXd e = target - current;
  for (int i = 0; i < chain.task_dim(); ++i) {
    if (chain.IsAngular(i)) e[i] = WrapAngle(WrapAngle(target[i]) - WrapAngle(current[i]));
  }
  return e;
}

Eigen::VectorXd TaskPolicyVector(const TaskPolicy& b, const SerialChain& chain,
                                 const ConstraintModel& model, const JointState& q) {
  if (model.feature_dim() != chain.task_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "constraint does not match chain task space");
  }
  return model.lambda() * TaskError(chain, b.target, chain.ForwardKinematics(q));
}

Eigen::VectorXd ManipulabilityGradient(const ConstraintModel& model, const SerialChain& chain,
                                       const JointState& q, double h) {
  const double v0 = Manipulability(model, chain, q);
  Eigen::VectorXd g(q.size());
  JointState probe = q;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    probe[i] = q[i] + h;
    const double up = Manipulability(model, chain, probe);
    probe[i] = q[i] - h;
    const double down = Manipulability(model, chain, probe);
    probe[i] = q[i];
    if (up > v0 && down > v0) {
      g[i] = up >= down ? (up - v0) / h : -(down - v0) / h;
    } else {
      g[i] = (up - down) / (2.0 * h);
    }
  }
  return g;
}

Eigen::VectorXd NullPolicyVector(const NullPolicy& p, const ConstraintModel& model,
                                 const SerialChain& chain, const JointState& q) {
  if (q.size() != chain.dof()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint state does not match chain");
  }
  switch (p.kind) {
    case NullPolicyKind::kZero:
      return Eigen::VectorXd::Zero(q.size());
    case NullPolicyKind::kPointAttractor:
      if (p.psi_star.size() != q.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "psi_star does not match chain");
      }
      return p.alpha * (p.psi_star - q);
    case NullPolicyKind::kManipGradient:
      return p.alpha * ManipulabilityGradient(p.gradient_model ? *p.gradient_model : model,
                                              chain, q, p.grad_step);
  }
  return Eigen::VectorXd::Zero(q.size());
}

}  // namespace cmlearn
