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
#include <span>
#include <string>
#include <vector>

#include "cmlearn/chains.hpp"
#include "cmlearn/constraint.hpp"
#include "cmlearn/simulator.hpp"

namespace cmlearn {

struct NmieResult {
  double nmie = 0.0;
  double v_variance = 0.0;  // population variance of the true index
  int n_points = 0;
};

// Mean squared manipulability error normalised by the variance of the true
// index over the test states. Throws ZeroVariance when that variance is 0.
NmieResult NmieFromValues(std::span<const double> v, std::span<const double> v_hat);
NmieResult Nmie(const ConstraintModel& truth, const ConstraintModel& learned,
                const SerialChain& chain, std::span<const JointState> test_states);

struct RmseOptions {
  int steps = 100;
  double dt = 0.02;
  double alpha = 1.0;
  double grad_step = 1e-6;
  PinvPolicy pinv = PinvPolicy::Truncate();
  SimOptions sim;
};

struct RmseResult {
  double rmse = 0.0;      // rad, over every step and joint
  bool diverged = false;  // either run diverged; rmse is then meaningless
  SimStatus true_status = SimStatus::kCompleted;
  SimStatus learned_status = SimStatus::kCompleted;
};

// Runs the manipulability-gradient controller twice from the same start:
// once ascending the true index, once the learnt one. Both execute the true
// constraint for the task term.
RmseResult TrajectoryRmse(const SerialChain& chain, const ConstraintModel& truth,
                          const ConstraintModel& learned, const JointState& start,
                          const TaskPose& target, const RmseOptions& options = {});

// Root mean square of the element-wise difference of two equally long
// state sequences.
double StateRmse(std::span<const JointState> a, std::span<const JointState> b);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;       // sample (n - 1) standard deviation
  int n = 0;
  bool single = false;   // one value: sd set to 0 by convention
};

// Throws InvalidArgument on an empty list.
Summary Summarize(std::span<const double> values);

struct EvalReport {
  std::string label;
  std::vector<double> nmie;                // per trial
  std::vector<double> rmse;                // per trial, may be empty
  std::vector<double> v_variance;          // per trial
  std::vector<int> n_points;               // per trial
  int excluded = 0;                        // diverged trials left out of rmse

  std::optional<Summary> NmieSummary() const;
  std::optional<Summary> RmseSummary() const;
  // trial,nmie,rmse,v_variance,n_points
  std::string ToCsv() const;
  std::string SummaryBlock() const;
};

}  // namespace cmlearn
