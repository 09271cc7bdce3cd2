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

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "cmlearn/chains.hpp"
#include "cmlearn/constraint.hpp"

namespace cmlearn {

// Linear task-space point attractor b(q) = r* - r(q).
struct TaskPolicy {
  TaskPose target;
};

enum class NullPolicyKind { kZero, kPointAttractor, kManipGradient };

std::string_view NullPolicyName(NullPolicyKind kind);
NullPolicyKind ParseNullPolicyKind(std::string_view name);

struct NullPolicy {
  NullPolicyKind kind = NullPolicyKind::kZero;
  JointState psi_star;      // point attractor only
  double alpha = 1.0;       // gain, 1/s
  double grad_step = 1e-6;  // finite-difference step, rad
  // Model whose manipulability is ascended. Unset means the model passed to
  // NullPolicyVector, normally the one the controller executes.
  std::optional<ConstraintModel> gradient_model;

  static NullPolicy Zero() { return {}; }
  static NullPolicy PointAttractor(JointState psi_star, double alpha = 1.0);
  static NullPolicy ManipGradient(std::optional<ConstraintModel> model = std::nullopt,
                                  double alpha = 1.0, double grad_step = 1e-6);
};

// Full task-space error r* - r with angular coordinates wrapped to (-pi, pi].
Eigen::VectorXd TaskError(const SerialChain& chain, const TaskPose& target,
                          const TaskPose& current);

// Lambda * (r* - r(q)): the attractor restricted to the constrained rows.
Eigen::VectorXd TaskPolicyVector(const TaskPolicy& b, const SerialChain& chain,
                                 const ConstraintModel& model, const JointState& q);

// Finite-difference gradient of the manipulability index.
//
// Central differences with step h, except on axes where v rises on both
// sides of q. That only happens at a kink of v, i.e. on the singular set
// where v is the norm of a vanishing vector and the central difference is
// zero by symmetry; there the steeper one-sided slope is taken instead.
Eigen::VectorXd ManipulabilityGradient(const ConstraintModel& model, const SerialChain& chain,
                                       const JointState& q, double h);

Eigen::VectorXd NullPolicyVector(const NullPolicy& p, const ConstraintModel& model,
                                 const SerialChain& chain, const JointState& q);

}  // namespace cmlearn
