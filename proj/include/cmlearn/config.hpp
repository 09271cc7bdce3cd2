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
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cmlearn/demos.hpp"
#include "cmlearn/experiments.hpp"
#include "cmlearn/metrics.hpp"

namespace cmlearn {

enum class ExperimentKind { kGenDemos, kLearn, kEvalNmie, kEvalRmse, kCompareScenario };

std::string_view ExperimentKindName(ExperimentKind kind);
ExperimentKind ParseExperimentKind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kGenDemos;
  std::uint64_t seed = 0;
  DemoConfig demo;  // chain, constraint and demonstration settings
  LearnSettings learn;
  RmseOptions rmse;
  int trials = 50;             // NMIE trials
  int rmse_trajectories = 20;
  std::string scenario = "compare1";
  CompareSpec compare;         // resolved from scenario plus overrides
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;        // 0: hardware concurrency
};

// Flat JSON object. Unknown keys and a missing seed are Config errors.
// Keys: experiment, chain, constraint, seed, trials, output_dir, threads,
// n_trajectories, points_per_traj, sim_steps, dt, alpha, psi_star_deg,
// start_deg, target, ik_max_iterations, ik_damping, ik_tolerance,
// ik_max_rejections, rbf_max_centers, rbf_kmeans_iterations,
// rbf_width_scale, rbf_ridge, refine_iterations, refine_tolerance,
// lm_iterations, lm_tolerance, restart_threshold, restart_ridge, grid_points,
// refine_starts, lambda_refine_tolerance, lambda_refine_iterations,
// rank_epsilon, k_max, rmse_trajectories, rmse_steps, rmse_dt, rmse_alpha,
// grad_step, pinv, pinv_threshold, scenario, compare_steps,
// attractor_alpha, gradient_alpha, divergence_limit, stuck_speed,
// stuck_window, task_tolerance.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);

// Reads a JSON file; a missing file is a Config error naming the path.
nlohmann::json LoadConfigJson(const std::filesystem::path& path);

}  // namespace cmlearn
