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

#include <doctest.h>

#include <cmath>

#include "cmlearn/error.hpp"
#include "cmlearn/experiments.hpp"
#include "cmlearn/simulator.hpp"
#include "test_util.hpp"

using namespace cmlearn;
using cmlearn::testing::RandomVector;

TEST_CASE("no task error and zero policy give zero action") {
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const Eigen::Vector3d q(0.2, 0.9, -0.4);
  const Eigen::VectorXd u = ControlStep(c, m, {c.ForwardKinematics(q)}, NullPolicy::Zero(),
                                        PinvPolicy::Truncate(), q);
  CHECK(u.norm() == 0.0);
}

TEST_CASE("square constraint has no null space") {
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m(Eigen::Matrix3d::Identity());
  const Eigen::Vector3d q(0.2, 0.9, -0.4);
  const TaskPolicy b{Eigen::Vector3d(1.0, 1.5, 0.3)};
  const Eigen::VectorXd u = ControlStep(c, m, b, NullPolicy::PointAttractor(Eigen::Vector3d(3, 3, 3)),
                                        PinvPolicy::Truncate(), q);
  const Eigen::VectorXd expect =
      c.Jacobian(q).lu().solve(TaskPolicyVector(b, c, m, q));
  CHECK((u - expect).norm() < 1e-12);
}

TEST_CASE("constraint consistency and null-space orthogonality along trajectories, 100 runs") {
  const SerialChain c = SerialChain::Preset("planar3");
  CounterRng rng(0x51);
  for (int n = 0; n < 100; ++n) {
    const char* id = n % 3 == 0 ? "xy" : (n % 3 == 1 ? "xtheta" : "ytheta");
    const ConstraintModel m = ConstraintModel::Preset(c, id);
    const JointState q0 = RandomVector(rng, 3, -kPi, kPi);
    const TaskPolicy b{Eigen::Vector3d(rng.Uniform(-1, 1), rng.Uniform(0, 2), rng.Uniform(0, kPi))};
    const NullPolicy p = NullPolicy::PointAttractor(RandomVector(rng, 3, -kPi, kPi));
    const SimOutcome o = Simulate(c, m, b, p, PinvPolicy::Truncate(), q0, 30, 0.02);
    for (std::size_t t = 0; t < o.trajectory.actions.size(); ++t) {
      const JointState& q = o.trajectory.states[t];
      if (Manipulability(m, c, q) < 1e-3) continue;  // full rank only
      const Eigen::MatrixXd a = ConstraintMatrix(m, c, q);
      CHECK((a * o.trajectory.actions[t] - TaskPolicyVector(b, c, m, q)).norm() < 1e-8);
      const Eigen::VectorXd npi = NullspaceProjector(a, PinvPolicy::Truncate()) * NullPolicyVector(p, m, c, q);
      CHECK((a * npi).norm() < 1e-9);
    }
  }
}

TEST_CASE("simulation is deterministic and traces every state") {
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const Eigen::Vector3d q0(0.1, 1.6, 0.1);
  const TaskPolicy b{Eigen::Vector3d(0.5, 1.5, 0)};
  const NullPolicy p = NullPolicy::ManipGradient();
  const SimOutcome a = Simulate(c, m, b, p, PinvPolicy::Truncate(), q0, 50, 0.02);
  const SimOutcome r = Simulate(c, m, b, p, PinvPolicy::Truncate(), q0, 50, 0.02);
  REQUIRE(a.trajectory.states.size() == 51);
  CHECK(a.trajectory.actions.size() == 50);
  CHECK(a.manip_trace.size() == a.trajectory.states.size());
  for (std::size_t t = 0; t < a.trajectory.states.size(); ++t) {
    CHECK((a.trajectory.states[t].array() == r.trajectory.states[t].array()).all());
  }
}

TEST_CASE("euler step integrates the action") {
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const Eigen::Vector3d q0(0.1, 1.6, 0.1);
  const SimOutcome o = Simulate(c, m, {Eigen::Vector3d(0.5, 1.5, 0)}, NullPolicy::Zero(),
                                PinvPolicy::Truncate(), q0, 3, 0.02);
  for (int t = 0; t < 3; ++t) {
    CHECK((o.trajectory.states[t + 1] - o.trajectory.states[t] - 0.02 * o.trajectory.actions[t]).norm() < 1e-15);
  }
}

TEST_CASE("folded-arm start with truncation: zero policy is stuck") {
  const CompareSpec s = CompareScenario("compare1");
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const SimOutcome o = Simulate(c, m, {s.target}, NullPolicy::Zero(), s.pinv, s.q0, 200, s.dt, m);
  CHECK(o.status == SimStatus::kStuck);
  CHECK(!o.reached);
  const Eigen::VectorXd r0 = c.ForwardKinematics(o.trajectory.states.front());
  const Eigen::VectorXd r1 = c.ForwardKinematics(o.trajectory.states.back());
  CHECK((r1 - r0).head(2).norm() < 1e-9);
}

TEST_CASE("plain pseudoinverse near the folded pose blows up the point attractor") {
  const CompareSpec s = CompareScenario("compare2");
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const SimOutcome o = Simulate(c, m, {s.target}, NullPolicy::PointAttractor(s.psi_star), s.pinv, s.q0,
                                200, s.dt, m);
  CHECK(o.status == SimStatus::kDiverged);
  CHECK(o.trajectory.actions.size() <= 5);
  CHECK(o.trajectory.states.back().cwiseAbs().maxCoeff() > 1e9);
}

TEST_CASE("status names and argument checks") {
  CHECK(SimStatusName(SimStatus::kStuck) == "stuck");
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  CHECK_THROWS_AS(Simulate(c, m, {Eigen::Vector3d::Zero()}, NullPolicy::Zero(), PinvPolicy::Truncate(),
                           Eigen::Vector3d::Zero(), 0, 0.02),
                  Error);
  CHECK_THROWS_AS(CompareScenario("compare9"), Error);
}
