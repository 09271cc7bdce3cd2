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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cmlearn/chains.hpp"
#include "cmlearn/constraint.hpp"
#include "cmlearn/policies.hpp"

namespace cmlearn {

struct TrajectoryMeta {
  std::string chain;
  std::string constraint;
  std::string policy;
  std::uint64_t seed = 0;
};

// Recorded (state, action) pairs, u = qdot. states may hold one extra final
// state that has no action.
struct Trajectory {
  std::vector<JointState> states;
  std::vector<Eigen::VectorXd> actions;
  double dt = 0.0;
  TrajectoryMeta meta;
};

enum class SimStatus { kCompleted, kStuck, kDiverged, kSingularAbort };

std::string_view SimStatusName(SimStatus status);

struct SimOptions {
  double divergence_limit = 1e9;      // rad
  double stuck_speed = 1e-12;         // rad/s
  int stuck_window = 5;               // consecutive steps
  double task_tolerance = 1e-3;       // on the constrained task error
};

struct SimOutcome {
  Trajectory trajectory;
  SimStatus status = SimStatus::kCompleted;
  std::vector<double> manip_trace;  // one entry per recorded state
  double final_task_error = 0.0;
  bool reached = false;             // final task error below tolerance
};

// u = A^+ b + N pi for the executing constraint. No clipping: singular
// blow-ups must stay visible. Throws SingularConstraint when a Plain
// pseudoinverse meets an all-zero A.
Eigen::VectorXd ControlStep(const SerialChain& chain, const ConstraintModel& model,
                            const TaskPolicy& b, const NullPolicy& p,
                            const PinvPolicy& pinv, const JointState& q);

// Explicit Euler q_{t+1} = q_t + dt * u_t for `steps` steps.
//
// The manipulability trace is evaluated on `trace_model` when given (the
// true constraint), otherwise on the executing model. Divergence (|q_i| over
// the limit or non-finite) and SingularAbort end the run early. A run is
// Stuck when |u| stays below stuck_speed for stuck_window consecutive steps
// while the task is unfinished and it never reaches the target afterwards.
SimOutcome Simulate(const SerialChain& chain, const ConstraintModel& model, const TaskPolicy& b,
                    const NullPolicy& p, const PinvPolicy& pinv, const JointState& q0,
                    int steps, double dt,
                    const std::optional<ConstraintModel>& trace_model = std::nullopt,
                    const SimOptions& options = {});

}  // namespace cmlearn
