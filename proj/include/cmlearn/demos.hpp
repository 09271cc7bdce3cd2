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
#include <string>
#include <utility>
#include <vector>

#include "cmlearn/chains.hpp"
#include "cmlearn/constraint.hpp"
#include "cmlearn/rng.hpp"
#include "cmlearn/simulator.hpp"

namespace cmlearn {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Damped least-squares feasibility test used to reject unreachable targets.
struct IkOptions {
  int max_iterations = 200;
  double damping = 1e-3;
  double tolerance = 1e-4;  // on the constrained-coordinate residual
  int max_rejections = 1000;
};

struct DemoConfig {
  std::string chain = "planar3";
  std::string constraint = "xy";
  int n_trajectories = 100;
  int points_per_traj = 10;
  // Simulated control steps per trajectory before down-sampling to
  // points_per_traj. 0 means exactly points_per_traj steps.
  int sim_steps = 0;
  std::vector<Interval> start_deg;  // per joint
  std::vector<Interval> target;     // per task coordinate (m or rad)
  JointState psi_star;              // rad
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double dt = 0.02;
  IkOptions ik;

  // 3-link planar reaching demonstrations: starts around (5, 95, 5) deg,
  // psi* = (10, -10, 10) deg, 100 trajectories of 10 points at 50 Hz.
  static DemoConfig PlanarDefaults(std::string constraint);
  // 7-joint analog: fixed start pose, x target in [-1, 1] m, 50
  // trajectories of 100 steps at 100 Hz down-sampled to 10 points.
  static DemoConfig Spatial7Defaults(std::string constraint = "x");

  void Validate() const;
};

struct DemonstrationSet {
  std::vector<Trajectory> trajectories;
  DemoConfig config;

  std::size_t size() const;  // total (state, action) pairs
};

JointState SampleStart(const DemoConfig& cfg, CounterRng& rng);

// Solves for the constrained coordinates of `target` by damped least squares
// from `seed`. Returns true when the residual drops below tolerance.
bool IkFeasible(const SerialChain& chain, const ConstraintModel& model, const TaskPose& target,
                const JointState& seed, const IkOptions& options);

// Rejection-samples a target whose constrained coordinates are reachable
// from the neutral pose (centre of the start ranges). Throws
// InfeasibleRegion after ik.max_rejections consecutive failures.
TaskPose SampleTarget(const DemoConfig& cfg, const SerialChain& chain, CounterRng& rng);

// Reaching demonstrations under the true constraint, task attractor and a
// joint-space point attractor to psi* in the null space. Trajectory i draws
// from stream DeriveSeed(seed, i).
DemonstrationSet GenerateDemos(const DemoConfig& cfg, unsigned threads = 0);

// n samples at indices round(i (L - 1) / (n - 1)); keeps both endpoints.
Trajectory Downsample(const Trajectory& t, int n);

}  // namespace cmlearn
