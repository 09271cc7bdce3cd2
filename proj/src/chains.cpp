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

#include "cmlearn/chains.hpp"

#include <cmath>
#include <string>

#include "cmlearn/error.hpp"

namespace cmlearn {

double WrapAngle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

SerialChain SerialChain::Planar(std::vector<double> link_lengths) {
  if (link_lengths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "planar chain needs at least one link");
  }
  for (double l : link_lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::kInvalidArgument, "planar link lengths must be positive");
    }
  }
  SerialChain chain;
  chain.kind_ = ChainKind::kPlanar;
  chain.dof_ = static_cast<int>(link_lengths.size());
  chain.lengths_ = std::move(link_lengths);
  return chain;
}

SerialChain SerialChain::SpatialDh(std::vector<DhParams> joints) {
  if (joints.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "DH chain needs at least one joint");
  }
  SerialChain chain;
  chain.kind_ = ChainKind::kSpatialDh;
  chain.dof_ = static_cast<int>(joints.size());
  chain.dh_ = std::move(joints);
  return chain;
}

SerialChain SerialChain::Preset(std::string_view name) {
  if (name == "planar3") return Planar({1.0, 1.0, 1.0});
  if (name == "spatial7") {
    // Alternating +-90 deg twists with offsets on joints 1, 3, 5, 7; the
    // shoulder-to-tip distance at full stretch is 0.40 + 0.40 + 0.46 m.
    constexpr double h = kPi / 2.0;
    return SpatialDh({
        {0.0, -h, 0.317, 0.0},
        {0.0, h, 0.0, 0.0},
        {0.0, -h, 0.40, 0.0},
        {0.0, h, 0.0, 0.0},
        {0.0, -h, 0.40, 0.0},
        {0.0, h, 0.0, 0.0},
        {0.0, 0.0, 0.46, 0.0},
    });
  }
  throw Error(ErrorCode::kConfig, "unknown chain preset '" + std::string(name) + "'");
}

void SerialChain::CheckState(const JointState& q) const {
  if (q.size() != dof_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "joint state has " + std::to_string(q.size()) + " entries, chain has " +
                    std::to_string(dof_) + " joints");
  }
  if (!q.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "joint state is not finite");
  }
}

namespace {

Eigen::Matrix4d DhTransform(const DhParams& p, double q) {
  const double th = q + p.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
  Eigen::Matrix4d t;
  t << ct, -st * ca, st * sa, p.a * ct,
       st, ct * ca, -ct * sa, p.a * st,
       0.0, sa, ca, p.d,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

TaskPose SerialChain::ForwardKinematics(const JointState& q) const {
  CheckState(q);
  TaskPose r = TaskPose::Zero(3);
  if (kind_ == ChainKind::kPlanar) {
    double theta = 0.0;
    for (int i = 0; i < dof_; ++i) {
      theta += q[i];
      r[0] += lengths_[i] * std::cos(theta);
      r[1] += lengths_[i] * std::sin(theta);
    }
    r[2] = WrapAngle(theta);
    return r;
  }
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int i = 0; i < dof_; ++i) t = t * DhTransform(dh_[i], q[i]);
  return t.block<3, 1>(0, 3);
}

Eigen::MatrixXd SerialChain::Jacobian(const JointState& q) const {
  CheckState(q);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, dof_);
  if (kind_ == ChainKind::kPlanar) {
    std::vector<double> theta(dof_);
    double acc = 0.0;
    for (int i = 0; i < dof_; ++i) theta[i] = (acc += q[i]);
    // Column i sums the contributions of links i..n-1.
    double sx = 0.0, sy = 0.0;
    for (int i = dof_ - 1; i >= 0; --i) {
      sx += lengths_[i] * std::cos(theta[i]);
      sy += lengths_[i] * std::sin(theta[i]);
      jac(0, i) = -sy;
      jac(1, i) = sx;
      jac(2, i) = 1.0;
    }
    return jac;
  }
  std::vector<Eigen::Vector3d> origins(dof_ + 1), axes(dof_ + 1);
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  origins[0] = Eigen::Vector3d::Zero();
  axes[0] = Eigen::Vector3d::UnitZ();
  for (int i = 0; i < dof_; ++i) {
    t = t * DhTransform(dh_[i], q[i]);
    origins[i + 1] = t.block<3, 1>(0, 3);
    axes[i + 1] = t.block<3, 1>(0, 2);
  }
  const Eigen::Vector3d tip = origins[dof_];
  for (int i = 0; i < dof_; ++i) {
    jac.col(i) = axes[i].cross(tip - origins[i]);
  }
  return jac;
}

}  // namespace cmlearn
