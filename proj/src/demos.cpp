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

#include "cmlearn/demos.hpp"

#include <cmath>
#include <string>

#include "cmlearn/error.hpp"
#include "cmlearn/parallel.hpp"
#include "cmlearn/policies.hpp"

namespace cmlearn {

DemoConfig DemoConfig::PlanarDefaults(std::string constraint) {
  DemoConfig cfg;
  cfg.chain = "planar3";
  cfg.constraint = std::move(constraint);
  cfg.start_deg = {{0.0, 10.0}, {90.0, 100.0}, {0.0, 10.0}};
  cfg.target = {{-1.0, 1.0}, {0.0, 2.0}, {0.0, kPi}};
  cfg.psi_star = JointState(3);
  cfg.psi_star << Deg(10.0), Deg(-10.0), Deg(10.0);
  cfg.dt = 0.02;
  return cfg;
}

DemoConfig DemoConfig::Spatial7Defaults(std::string constraint) {
  DemoConfig cfg;
  cfg.chain = "spatial7";
  cfg.constraint = std::move(constraint);
  cfg.n_trajectories = 50;
  cfg.points_per_traj = 10;
  cfg.sim_steps = 100;
  const double start[7] = {-100.0, 30.0, -100.0, 40.0, -60.0, -70.0, 250.0};
  cfg.psi_star = JointState(7);
  for (int i = 0; i < 7; ++i) {
    cfg.start_deg.push_back({start[i], start[i]});
    cfg.psi_star[i] = Deg(start[i] + (i % 2 == 0 ? 20.0 : -20.0));
  }
  cfg.target = {{-1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}};
  cfg.dt = 0.01;
  return cfg;
}

void DemoConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (n_trajectories < 1) fail("n_trajectories must be >= 1");
  if (points_per_traj < 1) fail("points_per_traj must be >= 1");
  if (sim_steps != 0 && sim_steps < points_per_traj) fail("sim_steps must be >= points_per_traj");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  const SerialChain c = SerialChain::Preset(chain);
  if (static_cast<int>(start_deg.size()) != c.dof()) fail("start ranges do not match chain dof");
  if (static_cast<int>(target.size()) != c.task_dim()) fail("target ranges do not match task dim");
  if (psi_star.size() != c.dof()) fail("psi_star does not match chain dof");
  for (const auto& r : start_deg) if (!(r.lo <= r.hi)) fail("start range is not ordered");
  for (const auto& r : target) if (!(r.lo <= r.hi)) fail("target range is not ordered");
  ConstraintModel::Preset(c, constraint);
}

std::size_t DemonstrationSet::size() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.actions.size();
  return n;
}

JointState SampleStart(const DemoConfig& cfg, CounterRng& rng) {
  JointState q(static_cast<Eigen::Index>(cfg.start_deg.size()));
  for (std::size_t i = 0; i < cfg.start_deg.size(); ++i) {
    q[static_cast<Eigen::Index>(i)] = Deg(rng.Uniform(cfg.start_deg[i].lo, cfg.start_deg[i].hi));
  }
  return q;
}

bool IkFeasible(const SerialChain& chain, const ConstraintModel& model, const TaskPose& target,
                const JointState& seed, const IkOptions& options) {
  JointState q = seed;
  const TaskPolicy b{target};
  const double damping2 = options.damping * options.damping;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd e = TaskPolicyVector(b, chain, model, q);
    if (e.norm() < options.tolerance) return true;
    if (it == options.max_iterations) break;
    const Eigen::MatrixXd a = ConstraintMatrix(model, chain, q);
    Eigen::MatrixXd gram = a * a.transpose();
    gram.diagonal().array() += damping2;
    q += a.transpose() * gram.ldlt().solve(e);
    if (!q.allFinite()) return false;
  }
  return false;
}

namespace {

JointState NeutralPose(const DemoConfig& cfg) {
  JointState q(static_cast<Eigen::Index>(cfg.start_deg.size()));
  for (std::size_t i = 0; i < cfg.start_deg.size(); ++i) {
    q[static_cast<Eigen::Index>(i)] = Deg(0.5 * (cfg.start_deg[i].lo + cfg.start_deg[i].hi));
  }
  return q;
}

}  // namespace

TaskPose SampleTarget(const DemoConfig& cfg, const SerialChain& chain, CounterRng& rng) {
  const ConstraintModel model = ConstraintModel::Preset(chain, cfg.constraint);
  const JointState neutral = NeutralPose(cfg);
  TaskPose r(chain.task_dim());
  for (int attempt = 0; attempt < cfg.ik.max_rejections; ++attempt) {
    for (int i = 0; i < chain.task_dim(); ++i) r[i] = rng.Uniform(cfg.target[i].lo, cfg.target[i].hi);
    if (IkFeasible(chain, model, r, neutral, cfg.ik)) return r;
  }
  throw Error(ErrorCode::kInfeasibleRegion,
              "no reachable target after " + std::to_string(cfg.ik.max_rejections) + " draws");
}

Trajectory Downsample(const Trajectory& t, int n) {
  const int length = static_cast<int>(t.states.size());
  if (n < 1 || n > length) {
    throw Error(ErrorCode::kInvalidArgument, "cannot downsample " + std::to_string(length) +
                                                 " points to " + std::to_string(n));
  }
  if (!t.actions.empty() && t.actions.size() != t.states.size()) {
    throw Error(ErrorCode::kInvalidArgument, "downsampling needs one action per state");
  }
  Trajectory out;
  out.dt = t.dt;
  out.meta = t.meta;
  for (int i = 0; i < n; ++i) {
    const int idx = n == 1 ? 0
                           : static_cast<int>(std::lround(static_cast<double>(i) * (length - 1) /
                                                          (n - 1)));
    out.states.push_back(t.states[idx]);
    if (!t.actions.empty()) out.actions.push_back(t.actions[idx]);
  }
  return out;
}

DemonstrationSet GenerateDemos(const DemoConfig& cfg, unsigned threads) {
  cfg.Validate();
  const SerialChain chain = SerialChain::Preset(cfg.chain);
  const ConstraintModel truth = ConstraintModel::Preset(chain, cfg.constraint);
  const NullPolicy pi = NullPolicy::PointAttractor(cfg.psi_star, cfg.alpha);
  const int steps = cfg.sim_steps > 0 ? cfg.sim_steps : cfg.points_per_traj;

  DemonstrationSet set;
  set.config = cfg;
  set.trajectories.resize(static_cast<std::size_t>(cfg.n_trajectories));
  ParallelFor(
      set.trajectories.size(),
      [&](std::size_t i) {
        CounterRng rng(DeriveSeed(cfg.seed, i));
        const JointState q0 = SampleStart(cfg, rng);
        const TaskPose target = SampleTarget(cfg, chain, rng);
        SimOutcome sim = Simulate(chain, truth, TaskPolicy{target}, pi, PinvPolicy::Truncate(),
                                  q0, steps, cfg.dt);
        if (sim.status == SimStatus::kDiverged || sim.status == SimStatus::kSingularAbort) {
          throw Error(ErrorCode::kSingularConstraint,
                      "demonstration " + std::to_string(i) + " left the valid workspace");
        }
        Trajectory t = std::move(sim.trajectory);
        t.states.resize(t.actions.size());  // drop the final state, it has no action
        if (static_cast<int>(t.states.size()) != cfg.points_per_traj) {
          t = Downsample(t, cfg.points_per_traj);
        }
        t.meta = {cfg.chain, cfg.constraint, "point_attractor", DeriveSeed(cfg.seed, i)};
        set.trajectories[i] = std::move(t);
      },
      threads);
  return set;
}

}  // namespace cmlearn
