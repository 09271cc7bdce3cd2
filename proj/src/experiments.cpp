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

#include "cmlearn/experiments.hpp"

#include <algorithm>
#include <limits>

#include "cmlearn/error.hpp"
#include "cmlearn/parallel.hpp"
#include "cmlearn/rng.hpp"

namespace cmlearn {

LearnedPipeline LearnFromDemos(const DemonstrationSet& data, const LearnSettings& settings) {
  const SerialChain chain = SerialChain::Preset(data.config.chain);
  NullComponentModel ns = SeparateNullComponent(data, settings.separation);
  const int k_max = settings.k_max > 0 ? settings.k_max : chain.task_dim();
  LambdaEstimate est = LearnLambda(data, ns, k_max, settings.learn);
  ConstraintModel model = LearnedModel(est);
  return {std::move(ns), std::move(est), std::move(model)};
}

std::uint64_t TrialSeed(std::uint64_t study_seed, std::uint64_t trial) {
  return DeriveSeed(study_seed, trial);
}

DemoConfig WithSeed(DemoConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

NmieTrial RunNmieTrial(const DemoConfig& base, std::uint64_t trial_seed,
                       const LearnSettings& settings) {
  const SerialChain chain = SerialChain::Preset(base.chain);
  const ConstraintModel truth = ConstraintModel::Preset(chain, base.constraint);
  const DemonstrationSet train = GenerateDemos(WithSeed(base, DeriveSeed(trial_seed, 0)), 1);
  const DemonstrationSet test = GenerateDemos(WithSeed(base, DeriveSeed(trial_seed, 1)), 1);
  LearnedPipeline learned = LearnFromDemos(train, settings);
  const Samples s = Flatten(test);
  NmieTrial out;
  out.nmie = Nmie(truth, learned.model, chain, s.states);
  out.separation_objective = learned.separation.final_objective;
  out.estimate = std::move(learned.estimate);
  return out;
}

NmieStudy RunNmieStudy(const DemoConfig& base, std::uint64_t seed, int trials,
                       const LearnSettings& settings, unsigned threads) {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  base.Validate();
  std::vector<NmieTrial> results(static_cast<std::size_t>(trials));
  ParallelFor(
      static_cast<std::size_t>(trials),
      [&](std::size_t t) { results[t] = RunNmieTrial(base, TrialSeed(seed, t), settings); },
      threads);
  NmieStudy study;
  study.report.label = base.chain + " " + base.constraint + " nmie";
  for (const auto& r : results) {
    study.report.nmie.push_back(r.nmie.nmie);
    study.report.v_variance.push_back(r.nmie.v_variance);
    study.report.n_points.push_back(r.nmie.n_points);
    study.k.push_back(r.estimate.k);
  }
  return study;
}

RmseStudy RunRmseStudy(const DemoConfig& base, std::uint64_t seed, int trajectories,
                       const RmseOptions& rmse, const LearnSettings& settings,
                       unsigned threads) {
  if (trajectories < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trajectory");
  const SerialChain chain = SerialChain::Preset(base.chain);
  const ConstraintModel truth = ConstraintModel::Preset(chain, base.constraint);
  const DemonstrationSet train = GenerateDemos(WithSeed(base, DeriveSeed(seed, 0)), threads);
  LearnedPipeline learned = LearnFromDemos(train, settings);

  const std::uint64_t reach_seed = DeriveSeed(seed, 1);
  std::vector<RmseResult> runs(static_cast<std::size_t>(trajectories));
  ParallelFor(
      static_cast<std::size_t>(trajectories),
      [&](std::size_t i) {
        CounterRng rng(DeriveSeed(reach_seed, i));
        const JointState start = SampleStart(base, rng);
        const TaskPose target = SampleTarget(base, chain, rng);
        runs[i] = TrajectoryRmse(chain, truth, learned.model, start, target, rmse);
      },
      threads);

  RmseStudy study;
  study.report.label = base.chain + " " + base.constraint + " rmse";
  for (const auto& r : runs) {
    if (r.diverged) {
      ++study.report.excluded;
    } else {
      study.report.rmse.push_back(r.rmse);
    }
  }
  study.estimate = std::move(learned.estimate);
  study.runs = std::move(runs);
  return study;
}

CompareSpec CompareScenario(std::string_view name) {
  CompareSpec s;
  s.name = std::string(name);
  s.target = TaskPose::Zero(3);
  s.q0.resize(3);
  s.psi_star.resize(3);
  if (name == "compare1") {
    // Stretched arm folded back on itself: the truncating pseudoinverse
    // discards the vanishing singular direction.
    s.q0 << Deg(90 + 1e-12), Deg(360), Deg(-360);
    s.psi_star << Deg(-190), Deg(9), Deg(-307);
    s.pinv = PinvPolicy::Truncate();
    s.gradient_alpha = 10.0;
    s.steps = 600;
  } else if (name == "compare2") {
    s.q0 << Deg(90), Deg(-180), Deg(-180 + 1e-10);
    s.psi_star << Deg(-33), Deg(-283), Deg(193);
    s.pinv = PinvPolicy::Plain();
    s.steps = 200;
  } else {
    throw Error(ErrorCode::kConfig, "unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

CompareResult RunCompare(const CompareSpec& spec, const ConstraintModel& gradient_model) {
  const SerialChain chain = SerialChain::Preset("planar3");
  const ConstraintModel truth = ConstraintModel::Preset(chain, "xy");
  const TaskPolicy b{spec.target};
  CompareResult r;
  r.spec = spec;
  const auto run = [&](const NullPolicy& p) {
    return Simulate(chain, truth, b, p, spec.pinv, spec.q0, spec.steps, spec.dt, truth, spec.sim);
  };
  r.runs.push_back({"zero", run(NullPolicy::Zero())});
  r.runs.push_back({"point_attractor", run(NullPolicy::PointAttractor(spec.psi_star, spec.attractor_alpha))});
  r.runs.push_back({"manip_gradient", run(NullPolicy::ManipGradient(gradient_model, spec.gradient_alpha, spec.grad_step))});
  return r;
}

double MinAfterStart(const std::vector<double>& trace) {
  if (trace.size() < 2) return trace.empty() ? 0.0 : trace.front();
  return *std::min_element(trace.begin() + 1, trace.end());
}

}  // namespace cmlearn
