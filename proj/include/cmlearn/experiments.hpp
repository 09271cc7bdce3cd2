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

#include "cmlearn/demos.hpp"
#include "cmlearn/learning.hpp"
#include "cmlearn/metrics.hpp"
#include "cmlearn/simulator.hpp"

namespace cmlearn {

// Recipes shared by the command-line tool and the acceptance suite.

struct LearnSettings {
  SeparationOptions separation;
  LearnOptions learn;
  int k_max = 0;  // 0: the feature dimension
};

struct LearnedPipeline {
  NullComponentModel separation;
  LambdaEstimate estimate;
  ConstraintModel model;
};

LearnedPipeline LearnFromDemos(const DemonstrationSet& data, const LearnSettings& settings);

// Trial t of a study seeded with s trains on DemoConfig seed
// DeriveSeed(DeriveSeed(s, t), 0) and tests on DeriveSeed(DeriveSeed(s, t), 1).
std::uint64_t TrialSeed(std::uint64_t study_seed, std::uint64_t trial);
DemoConfig WithSeed(DemoConfig cfg, std::uint64_t seed);

struct NmieTrial {
  NmieResult nmie;
  LambdaEstimate estimate;
  double separation_objective = 0.0;
};

NmieTrial RunNmieTrial(const DemoConfig& base, std::uint64_t trial_seed,
                       const LearnSettings& settings);

struct NmieStudy {
  EvalReport report;
  std::vector<int> k;  // chosen rank per trial
};

// Trials run in parallel and are reduced in trial order.
NmieStudy RunNmieStudy(const DemoConfig& base, std::uint64_t seed, int trials,
                       const LearnSettings& settings, unsigned threads = 0);

struct RmseStudy {
  EvalReport report;
  LambdaEstimate estimate;
  std::vector<RmseResult> runs;
};

// Learns once from demonstrations with seed DeriveSeed(seed, 0), then
// compares the true- and learnt-index controllers on `trajectories` random
// reaches; reach i draws from DeriveSeed(DeriveSeed(seed, 1), i).
RmseStudy RunRmseStudy(const DemoConfig& base, std::uint64_t seed, int trajectories,
                       const RmseOptions& rmse, const LearnSettings& settings,
                       unsigned threads = 0);

// Singular-start comparison on the planar chain under the (x, y) constraint.
struct CompareSpec {
  std::string name;
  JointState q0;
  TaskPose target;
  PinvPolicy pinv;
  JointState psi_star;    // point-attractor run
  double attractor_alpha = 1.0;
  double gradient_alpha = 1.0;
  double grad_step = 1e-6;
  int steps = 200;
  double dt = 0.02;
  SimOptions sim;
};

// "compare1" or "compare2"; throws Config otherwise.
CompareSpec CompareScenario(std::string_view name);

struct ScenarioRun {
  std::string policy;  // zero | point_attractor | manip_gradient
  SimOutcome outcome;
};

struct CompareResult {
  CompareSpec spec;
  std::vector<ScenarioRun> runs;  // zero, point_attractor, manip_gradient
};

// The gradient run ascends `gradient_model` (normally learnt); every run
// executes and traces the true constraint.
CompareResult RunCompare(const CompareSpec& spec, const ConstraintModel& gradient_model);

// Minimum of the manipulability trace after the start state.
double MinAfterStart(const std::vector<double>& trace);

}  // namespace cmlearn
