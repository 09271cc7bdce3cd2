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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmlearn/chains.hpp"
#include "cmlearn/constraint.hpp"
#include "cmlearn/demos.hpp"

namespace cmlearn {

// Settings for separating null-space motion from raw actions.
struct SeparationOptions {
  int max_centers = 100;         // n_centers = min(max_centers, N / 4)
  int kmeans_iterations = 100;
  double width_scale = 2.0;      // times the median pairwise center distance
  double ridge = 1e-12;
  int refine_iterations = 100;   // alternating projection-target refits
  double refine_tolerance = 1e-10;
  int lm_iterations = 1000;      // direct minimisation of the same objective
  double lm_tolerance = 1e-14;   // relative objective decrease
  // Restart from the plain regression, first under restart_ridge, when the
  // fit ends above this fraction of sum |u|^2.
  double restart_threshold = 1e-9;
  double restart_ridge = 1e-6;
};

// Gaussian RBF regression q -> u_ns with one shared width and an affine tail.
class NullComponentModel {
 public:
  NullComponentModel() = default;
  NullComponentModel(Eigen::MatrixXd centers, double width, Eigen::MatrixXd weights);

  int dof() const noexcept { return static_cast<int>(centers_.cols()); }
  int n_centers() const noexcept { return static_cast<int>(centers_.rows()); }
  // Gaussians, then a constant, then q itself.
  int feature_dim() const noexcept { return n_centers() + 1 + dof(); }
  double width() const noexcept { return width_; }
  const Eigen::MatrixXd& centers() const noexcept { return centers_; }  // n_centers x dof
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }  // dof x feature_dim
  void set_weights(Eigen::MatrixXd weights) { weights_ = std::move(weights); }

  Eigen::VectorXd Features(const JointState& q) const;
  Eigen::VectorXd Predict(const JointState& q) const;

  // Objective of the regression of the raw actions and of the final fit.
  double initial_objective = 0.0;
  double final_objective = 0.0;

 private:
  Eigen::MatrixXd centers_;
  double width_ = 1.0;
  Eigen::MatrixXd weights_;
};

// Flattened (state, action) pairs of a demonstration set.
struct Samples {
  std::vector<JointState> states;
  std::vector<Eigen::VectorXd> actions;
};
Samples Flatten(const DemonstrationSet& data);

// sum_n |P_n u_n - w_n|^2 with P_n = w_n w_n^T / |w_n|^2 (P_n = 0 for w_n = 0).
double SeparationObjective(std::span<const Eigen::VectorXd> actions,
                           std::span<const Eigen::VectorXd> u_ns);

// Fits u_ns(q). Starts from the regression of the raw actions, refits against
// projected targets P_n u_n until the objective stalls, then minimises the
// objective over the weights by Levenberg-Marquardt.
// Throws DegenerateData when every action is (near) zero.
NullComponentModel SeparateNullComponent(const DemonstrationSet& data,
                                         const SeparationOptions& options = {});

struct LearnOptions {
  int grid_points = 36;        // per spherical angle, over [0, pi)
  int refine_starts = 4;       // best grid cells refined locally
  double refine_tolerance = 1e-10;
  int refine_iterations = 500;
  // Row j is kept while E_j <= rank_epsilon * sum |u_ns|^2.
  double rank_epsilon = 1e-3;
};

struct LambdaEstimate {
  Eigen::MatrixXd rows;                 // k x feature_dim, orthonormal
  std::vector<Eigen::VectorXd> angles;  // spherical angles of each row in its complement
  double objective_value = 0.0;         // E with the accepted rows
  double reference = 0.0;               // sum |u_ns|^2
  std::vector<double> objective_trace;  // E after each candidate row
  int k = 0;
};

// sum_n w_n^T (Lambda Phi_n)^+ (Lambda Phi_n) w_n.
double ConstraintObjective(const Eigen::MatrixXd& lambda, std::span<const Eigen::MatrixXd> features,
                           std::span<const Eigen::VectorXd> u_ns);

// Point on the unit sphere S^{m-1} from m-1 hyperspherical angles.
Eigen::VectorXd SphericalPoint(const Eigen::VectorXd& angles, int m);

// Orthonormal basis (columns) of the complement of the rows of `rows`.
Eigen::MatrixXd ComplementBasis(const Eigen::MatrixXd& rows, int dim);

// Greedy row-by-row estimate of the selection matrix with Phi = J.
LambdaEstimate LearnLambda(const SerialChain& chain, std::span<const JointState> states,
                           std::span<const Eigen::VectorXd> u_ns, int k_max,
                           const LearnOptions& options = {});
LambdaEstimate LearnLambda(const DemonstrationSet& data, const NullComponentModel& u_ns,
                           int k_max, const LearnOptions& options = {});

ConstraintModel LearnedModel(const LambdaEstimate& estimate);

}  // namespace cmlearn
