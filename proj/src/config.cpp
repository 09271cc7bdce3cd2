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

#include "cmlearn/config.hpp"

#include <fstream>
#include <set>

#include "cmlearn/error.hpp"

namespace cmlearn {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::kGenDemos, "gen"},
    {ExperimentKind::kLearn, "learn"},
    {ExperimentKind::kEvalNmie, "eval-nmie"},
    {ExperimentKind::kEvalRmse, "eval-rmse"},
    {ExperimentKind::kCompareScenario, "compare"},
};

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "experiment", "chain", "constraint", "seed", "trials", "output_dir", "threads",
      "n_trajectories", "points_per_traj", "sim_steps", "dt", "alpha", "psi_star_deg",
      "start_deg", "target", "ik_max_iterations", "ik_damping", "ik_tolerance",
      "ik_max_rejections", "rbf_max_centers", "rbf_kmeans_iterations", "rbf_width_scale",
      "rbf_ridge", "refine_iterations", "refine_tolerance", "lm_iterations", "lm_tolerance",
      "restart_threshold", "restart_ridge", "grid_points", "refine_starts", "lambda_refine_tolerance",
      "lambda_refine_iterations", "rank_epsilon", "k_max", "rmse_trajectories", "rmse_steps",
      "rmse_dt", "rmse_alpha", "grad_step", "pinv", "pinv_threshold", "scenario",
      "compare_steps", "attractor_alpha", "gradient_alpha", "divergence_limit", "stuck_speed",
      "stuck_window", "task_tolerance"};
  return keys;
}

template <typename T>
void Get(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<Interval> GetIntervals(const nlohmann::json& j, const char* key) {
  std::vector<Interval> out;
  try {
    for (const auto& pair : j.at(key)) {
      if (pair.size() != 2) throw Error(ErrorCode::kConfig, std::string("config key '") + key + "' needs [lo, hi] pairs");
      out.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfig, std::string("config key '") + key + "' has the wrong type");
  }
  return out;
}

}  // namespace

std::string_view ExperimentKindName(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) if (k == kind) return name;
  return "unknown";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) if (n == name) return k;
  throw Error(ErrorCode::kConfig, "unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig ConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!KnownKeys().contains(key)) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }
  if (!j.contains("seed")) throw Error(ErrorCode::kConfig, "config needs a seed");

  ExperimentConfig c;
  std::string s;
  if (j.contains("experiment")) {
    Get(j, "experiment", s);
    c.kind = ParseExperimentKind(s);
  }
  Get(j, "seed", c.seed);

  std::string chain = "planar3", constraint;
  Get(j, "chain", chain);
  if (chain != "planar3" && chain != "spatial7") {
    throw Error(ErrorCode::kConfig, "unknown chain '" + chain + "'");
  }
  constraint = chain == "planar3" ? "xy" : "x";
  Get(j, "constraint", constraint);
  c.demo = chain == "planar3" ? DemoConfig::PlanarDefaults(constraint)
                              : DemoConfig::Spatial7Defaults(constraint);
  DemoConfig& d = c.demo;
  d.seed = c.seed;
  Get(j, "n_trajectories", d.n_trajectories);
  Get(j, "points_per_traj", d.points_per_traj);
  Get(j, "sim_steps", d.sim_steps);
  Get(j, "dt", d.dt);
  Get(j, "alpha", d.alpha);
  if (j.contains("psi_star_deg")) {
    std::vector<double> psi;
    Get(j, "psi_star_deg", psi);
    d.psi_star.resize(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) d.psi_star[static_cast<Eigen::Index>(i)] = Deg(psi[i]);
  }
  if (j.contains("start_deg")) d.start_deg = GetIntervals(j, "start_deg");
  if (j.contains("target")) d.target = GetIntervals(j, "target");
  Get(j, "ik_max_iterations", d.ik.max_iterations);
  Get(j, "ik_damping", d.ik.damping);
  Get(j, "ik_tolerance", d.ik.tolerance);
  Get(j, "ik_max_rejections", d.ik.max_rejections);
  try {
    d.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }

  SeparationOptions& sep = c.learn.separation;
  Get(j, "rbf_max_centers", sep.max_centers);
  Get(j, "rbf_kmeans_iterations", sep.kmeans_iterations);
  Get(j, "rbf_width_scale", sep.width_scale);
  Get(j, "rbf_ridge", sep.ridge);
  Get(j, "refine_iterations", sep.refine_iterations);
  Get(j, "refine_tolerance", sep.refine_tolerance);
  Get(j, "lm_iterations", sep.lm_iterations);
  Get(j, "lm_tolerance", sep.lm_tolerance);
  Get(j, "restart_threshold", sep.restart_threshold);
  Get(j, "restart_ridge", sep.restart_ridge);
  LearnOptions& lo = c.learn.learn;
  Get(j, "grid_points", lo.grid_points);
  Get(j, "refine_starts", lo.refine_starts);
  Get(j, "lambda_refine_tolerance", lo.refine_tolerance);
  Get(j, "lambda_refine_iterations", lo.refine_iterations);
  Get(j, "rank_epsilon", lo.rank_epsilon);
  Get(j, "k_max", c.learn.k_max);
  if (sep.max_centers < 1 || !(sep.width_scale > 0.0) || !(sep.ridge >= 0.0) || lo.grid_points < 2 ||
      lo.refine_starts < 1 || c.learn.k_max < 0) {
    throw Error(ErrorCode::kConfig, "learner settings out of range");
  }

  Get(j, "trials", c.trials);
  Get(j, "rmse_trajectories", c.rmse_trajectories);
  c.rmse.dt = d.dt;
  Get(j, "rmse_steps", c.rmse.steps);
  Get(j, "rmse_dt", c.rmse.dt);
  Get(j, "rmse_alpha", c.rmse.alpha);
  Get(j, "grad_step", c.rmse.grad_step);
  if (c.trials < 1 || c.rmse_trajectories < 1 || c.rmse.steps < 1 || !(c.rmse.dt > 0.0) ||
      !(c.rmse.grad_step > 0.0)) {
    throw Error(ErrorCode::kConfig, "trial counts, steps, dt and grad_step must be positive");
  }

  Get(j, "scenario", c.scenario);
  c.compare = CompareScenario(c.scenario);
  c.compare.grad_step = c.rmse.grad_step;
  Get(j, "compare_steps", c.compare.steps);
  Get(j, "attractor_alpha", c.compare.attractor_alpha);
  Get(j, "gradient_alpha", c.compare.gradient_alpha);

  SimOptions sim;
  Get(j, "divergence_limit", sim.divergence_limit);
  Get(j, "stuck_speed", sim.stuck_speed);
  Get(j, "stuck_window", sim.stuck_window);
  Get(j, "task_tolerance", sim.task_tolerance);
  c.rmse.sim = sim;
  c.compare.sim = sim;

  if (j.contains("pinv")) {
    Get(j, "pinv", s);
    PinvPolicy p;
    if (s == "plain") {
      p = PinvPolicy::Plain();
    } else if (s == "truncate") {
      p = PinvPolicy::Truncate();
    } else {
      throw Error(ErrorCode::kConfig, "pinv must be 'plain' or 'truncate'");
    }
    if (j.contains("pinv_threshold")) {
      p.threshold_rule = ThresholdRule::kFixed;
      Get(j, "pinv_threshold", p.fixed_threshold);
    }
    c.rmse.pinv = p;
    c.compare.pinv = p;
  }

  std::string out = c.output_dir.string();
  Get(j, "output_dir", out);
  c.output_dir = out;
  Get(j, "threads", c.threads);
  return c;
}

nlohmann::json LoadConfigJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "config file '" + path.string() + "': " + e.what());
  }
}

}  // namespace cmlearn
