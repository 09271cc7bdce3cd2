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

#include "cmlearn/simulator.hpp"

#include <cmath>
#include <limits>

#include "cmlearn/error.hpp"

namespace cmlearn {

std::string_view SimStatusName(SimStatus status) {
  switch (status) {
    case SimStatus::kCompleted: return "completed";
    case SimStatus::kStuck: return "stuck";
    case SimStatus::kDiverged: return "diverged";
    case SimStatus::kSingularAbort: return "singular_abort";
  }
  return "completed";
}

Eigen::VectorXd ControlStep(const SerialChain& chain, const ConstraintModel& model,
                            const TaskPolicy& b, const NullPolicy& p,
                            const PinvPolicy& pinv, const JointState& q) {
  const Eigen::MatrixXd a = ConstraintMatrix(model, chain, q);
  const Eigen::MatrixXd a_pinv = Pseudoinverse(a, pinv);
  const Eigen::VectorXd task = a_pinv * TaskPolicyVector(b, chain, model, q);
  if (p.kind == NullPolicyKind::kZero) return task;
  const Eigen::MatrixXd n = Eigen::MatrixXd::Identity(a.cols(), a.cols()) - a_pinv * a;
  return task + n * NullPolicyVector(p, model, chain, q);
}

namespace {

bool OutOfBounds(const JointState& q, double limit) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q[i]) || std::abs(q[i]) > limit) return true;
  }
  return false;
}

}  // namespace

SimOutcome Simulate(const SerialChain& chain, const ConstraintModel& model, const TaskPolicy& b,
                    const NullPolicy& p, const PinvPolicy& pinv, const JointState& q0,
                    int steps, double dt, const std::optional<ConstraintModel>& trace_model,
                    const SimOptions& options) {
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (q0.size() != chain.dof() || !q0.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid start state");
  }
  const ConstraintModel& traced = trace_model ? *trace_model : model;
  auto task_error = [&](const JointState& q) {
    return TaskPolicyVector(b, chain, model, q).norm();
  };

  SimOutcome out;
  out.trajectory.dt = dt;
  out.trajectory.meta.chain = chain.kind() == ChainKind::kPlanar ? "planar" : "spatial";
  out.trajectory.meta.policy = std::string(NullPolicyName(p.kind));
  out.trajectory.states.reserve(static_cast<std::size_t>(steps) + 1);
  out.trajectory.actions.reserve(static_cast<std::size_t>(steps));

  JointState q = q0;
  out.trajectory.states.push_back(q);
  out.manip_trace.push_back(Manipulability(traced, chain, q));

  bool stuck = false;
  int slow_steps = 0;
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd u;
    try {
      u = ControlStep(chain, model, b, p, pinv, q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularConstraint) throw;
      out.status = SimStatus::kSingularAbort;
      out.final_task_error = task_error(q);
      return out;
    }
    const bool unfinished = task_error(q) >= options.task_tolerance;
    slow_steps = (u.allFinite() && u.norm() < options.stuck_speed && unfinished) ? slow_steps + 1 : 0;
    if (slow_steps >= options.stuck_window) stuck = true;

    out.trajectory.actions.push_back(u);
    q = q + dt * u;
    out.trajectory.states.push_back(q);
    if (OutOfBounds(q, options.divergence_limit)) {
      out.status = SimStatus::kDiverged;
      out.manip_trace.push_back(q.allFinite() ? Manipulability(traced, chain, q)
                                              : std::numeric_limits<double>::quiet_NaN());
      out.final_task_error = std::numeric_limits<double>::infinity();
      return out;
    }
    out.manip_trace.push_back(Manipulability(traced, chain, q));
  }
  out.final_task_error = task_error(q);
  out.reached = out.final_task_error < options.task_tolerance;
  out.status = (stuck && !out.reached) ? SimStatus::kStuck : SimStatus::kCompleted;
  return out;
}

}  // namespace cmlearn
