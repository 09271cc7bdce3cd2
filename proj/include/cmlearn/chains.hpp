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

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cmlearn {

// Joint angles (rad), one entry per revolute joint. Kept unwrapped.
using JointState = Eigen::VectorXd;
// Task coordinates: planar (x m, y m, theta rad), spatial (x, y, z) m.
using TaskPose = Eigen::VectorXd;

enum class ChainKind { kPlanar, kSpatialDh };

// Standard Denavit-Hartenberg parameters of one revolute joint.
struct DhParams {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

class SerialChain {
 public:
  static SerialChain Planar(std::vector<double> link_lengths);
  static SerialChain SpatialDh(std::vector<DhParams> joints);

  // "planar3" (unit links) or "spatial7" (anthropomorphic, 1.26 m reach).
  static SerialChain Preset(std::string_view name);

  ChainKind kind() const noexcept { return kind_; }
  int dof() const noexcept { return dof_; }
  int task_dim() const noexcept { return 3; }
  const std::vector<double>& link_lengths() const noexcept { return lengths_; }
  const std::vector<DhParams>& dh() const noexcept { return dh_; }

  // Planar: (x, y, theta) with theta wrapped to (-pi, pi].
  // Spatial: origin of the final DH frame.
  TaskPose ForwardKinematics(const JointState& q) const;

  // Analytic task Jacobian, task_dim x dof. Spatial chains return the
  // position rows of the geometric Jacobian.
  Eigen::MatrixXd Jacobian(const JointState& q) const;

  // Wrapped orientation rows are the ones that need angle differencing.
  bool IsAngular(int task_row) const noexcept {
    return kind_ == ChainKind::kPlanar && task_row == 2;
  }

 private:
  SerialChain() = default;
  void CheckState(const JointState& q) const;

  ChainKind kind_ = ChainKind::kPlanar;
  int dof_ = 0;
  std::vector<double> lengths_;
  std::vector<DhParams> dh_;
};

// Wraps an angle to (-pi, pi].
double WrapAngle(double angle);

constexpr double kPi = 3.14159265358979323846;
constexpr double Deg(double degrees) { return degrees * kPi / 180.0; }

}  // namespace cmlearn
