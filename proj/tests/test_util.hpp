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

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "cmlearn/chains.hpp"
#include "cmlearn/rng.hpp"

namespace cmlearn::testing {

inline Eigen::VectorXd RandomVector(CounterRng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.Uniform(lo, hi);
  return v;
}

inline Eigen::MatrixXd RandomMatrix(CounterRng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.Uniform(-1.0, 1.0);
  return m;
}

// Central differences of forward kinematics; angular rows are differenced
// through the wrap.
inline Eigen::MatrixXd FdJacobian(const SerialChain& chain, const JointState& q, double h = 1e-6) {
  Eigen::MatrixXd j(chain.task_dim(), chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    JointState qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    Eigen::VectorXd d = chain.ForwardKinematics(qp) - chain.ForwardKinematics(qm);
    for (int r = 0; r < chain.task_dim(); ++r) {
      if (chain.IsAngular(r)) d[r] = WrapAngle(d[r]);
    }
    j.col(i) = d / (2 * h);
  }
  return j;
}

// Forward kinematics by chaining homogeneous transforms Rz Tz Tx Rx.
inline Eigen::Vector3d DhOracle(const std::vector<DhParams>& dh, const JointState& q) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < dh.size(); ++i) {
    t = t * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)] + dh[i].theta_offset, Eigen::Vector3d::UnitZ());
    t = t * Eigen::Translation3d(dh[i].a, 0.0, dh[i].d);
    t = t * Eigen::AngleAxisd(dh[i].alpha, Eigen::Vector3d::UnitX());
  }
  return t.translation();
}

}  // namespace cmlearn::testing
