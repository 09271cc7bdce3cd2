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

// cmlearn: batch experiments for constrained-manipulability learning.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmlearn/config.hpp"
#include "cmlearn/error.hpp"
#include "cmlearn/experiments.hpp"
#include "cmlearn/io.hpp"

namespace {

using cmlearn::Error;
using cmlearn::ErrorCode;
using cmlearn::ExperimentConfig;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;  // key=json
  nlohmann::json cli = nlohmann::json::object();
};

void AddCommon(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--set", f.sets, "override one config key, key=value (JSON value or bare string)");
  sub->add_option_function<std::uint64_t>("--seed", [&f](std::uint64_t v) { f.cli["seed"] = v; }, "top-level seed");
  sub->add_option_function<std::string>("--chain", [&f](const std::string& v) { f.cli["chain"] = v; }, "planar3 | spatial7");
  sub->add_option_function<std::string>("--constraint", [&f](const std::string& v) { f.cli["constraint"] = v; }, "x, y, theta combinations, e.g. xy");
  sub->add_option_function<std::string>("--out", [&f](const std::string& v) { f.cli["output_dir"] = v; }, "output directory");
  sub->add_option_function<int>("--trials", [&f](int v) { f.cli["trials"] = v; }, "NMIE trials");
  sub->add_option_function<unsigned>("--threads", [&f](unsigned v) { f.cli["threads"] = v; }, "worker threads, 0 = all cores");
}

ExperimentConfig Resolve(const CommonFlags& f, const char* experiment) {
  nlohmann::json j = f.config.empty() ? nlohmann::json::object() : cmlearn::LoadConfigJson(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    try {
      j[key] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      j[key] = value;
    }
  }
  j.update(f.cli);
  j["experiment"] = experiment;
  return cmlearn::ConfigFromJson(j);
}

fs::path OutDir(const ExperimentConfig& c) { return cmlearn::ResolveOutputDir(c.output_dir); }

void Emit(const fs::path& path, const std::string& text) {
  cmlearn::WriteFileAtomic(path, text);
  std::cout << "wrote " << path.string() << '\n';
}

std::string TrajectoryCsv(const cmlearn::SimOutcome& o, const cmlearn::SerialChain& chain) {
  const auto& t = o.trajectory;
  const int dof = chain.dof();
  std::string s = "step";
  for (int i = 1; i <= dof; ++i) s += ",q_" + std::to_string(i);
  for (int i = 1; i <= dof; ++i) s += ",u_" + std::to_string(i);
  s += ",x,y,v\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    s += std::to_string(k);
    for (int i = 0; i < dof; ++i) s += "," + cmlearn::FormatDouble(t.states[k][i]);
    for (int i = 0; i < dof; ++i) s += "," + (k < t.actions.size() ? cmlearn::FormatDouble(t.actions[k][i]) : std::string());
    const cmlearn::TaskPose r = chain.ForwardKinematics(t.states[k]);
    s += "," + cmlearn::FormatDouble(r[0]) + "," + cmlearn::FormatDouble(r[1]);
    s += "," + (k < o.manip_trace.size() ? cmlearn::FormatDouble(o.manip_trace[k]) : std::string()) + "\n";
  }
  return s;
}

cmlearn::LearnedPipeline LearnPlanarXy(const ExperimentConfig& c) {
  cmlearn::DemoConfig demo = cmlearn::DemoConfig::PlanarDefaults("xy");
  demo.seed = c.seed;
  return cmlearn::LearnFromDemos(cmlearn::GenerateDemos(demo, c.threads), c.learn);
}

void RunCompareAndEmit(const ExperimentConfig& c, const cmlearn::CompareSpec& spec,
                       const cmlearn::ConstraintModel& learned) {
  const cmlearn::SerialChain chain = cmlearn::SerialChain::Preset("planar3");
  const cmlearn::CompareResult r = cmlearn::RunCompare(spec, learned);
  const fs::path dir = OutDir(c);
  std::vector<cmlearn::PlotTrace> traces;
  std::string manip = "step";
  std::size_t longest = 0;
  for (const auto& run : r.runs) {
    manip += ",v_" + run.policy;
    longest = std::max(longest, run.outcome.manip_trace.size());
    Emit(dir / (spec.name + "_" + run.policy + ".csv"), TrajectoryCsv(run.outcome, chain));
    cmlearn::PlotTrace t;
    t.label = run.policy;
    for (const auto& q : run.outcome.trajectory.states) {
      const cmlearn::TaskPose p = chain.ForwardKinematics(q);
      t.path.emplace_back(p[0], p[1]);
    }
    t.manip = run.outcome.manip_trace;
    traces.push_back(std::move(t));
    char line[200];
    std::snprintf(line, sizeof line, "%-16s %-10s steps %4zu  min v after start %.4g  final task error %.3g\n",
                  run.policy.c_str(), std::string(cmlearn::SimStatusName(run.outcome.status)).c_str(),
                  run.outcome.trajectory.actions.size(), cmlearn::MinAfterStart(run.outcome.manip_trace),
                  run.outcome.final_task_error);
    std::cout << line;
  }
  manip += "\n";
  for (std::size_t k = 0; k < longest; ++k) {
    manip += std::to_string(k);
    for (const auto& run : r.runs) {
      const auto& v = run.outcome.manip_trace;
      manip += "," + (k < v.size() ? cmlearn::FormatDouble(v[k]) : std::string());
    }
    manip += "\n";
  }
  Emit(dir / (spec.name + "_manipulability.csv"), manip);
  Emit(dir / (spec.name + ".svg"), cmlearn::RenderSvg(traces, spec.name + ": end-effector path and manipulability"));
}

int Gen(const ExperimentConfig& c) {
  const cmlearn::DemonstrationSet data = cmlearn::GenerateDemos(c.demo, c.threads);
  const fs::path path = OutDir(c) / ("demos_" + c.demo.chain + "_" + c.demo.constraint + ".csv");
  cmlearn::WriteDataset(path, data);
  std::cout << "wrote " << path.string() << " (+ .meta)\n"
            << "trajectories " << data.trajectories.size() << "  pairs " << data.size() << '\n';
  return 0;
}

int Learn(const ExperimentConfig& c, const std::string& data_path) {
  const cmlearn::DemonstrationSet data =
      data_path.empty() ? cmlearn::GenerateDemos(c.demo, c.threads) : cmlearn::ReadDataset(data_path);
  const cmlearn::LearnedPipeline p = cmlearn::LearnFromDemos(data, c.learn);
  cmlearn::ModelFile m{data.config.chain, p.estimate,
                       cmlearn::LearnerConfigHash(c.learn.separation, c.learn.learn)};
  const fs::path path = OutDir(c) / ("model_" + data.config.chain + "_" + data.config.constraint + ".txt");
  cmlearn::WriteModel(path, m);
  std::cout << "wrote " << path.string() << '\n';
  std::printf("k %d  objective %.3e  reference %.3e\n", p.estimate.k, p.estimate.objective_value,
              p.estimate.reference);
  for (int j = 0; j < p.estimate.k; ++j) {
    std::cout << "row " << j << ": " << p.estimate.rows.row(j) << '\n';
  }
  return 0;
}

int EvalNmie(const ExperimentConfig& c) {
  const cmlearn::NmieStudy s = cmlearn::RunNmieStudy(c.demo, c.seed, c.trials, c.learn, c.threads);
  Emit(OutDir(c) / ("nmie_" + c.demo.chain + "_" + c.demo.constraint + ".csv"), s.report.ToCsv());
  std::cout << s.report.SummaryBlock();
  return 0;
}

int EvalRmse(const ExperimentConfig& c) {
  const cmlearn::RmseStudy s =
      cmlearn::RunRmseStudy(c.demo, c.seed, c.rmse_trajectories, c.rmse, c.learn, c.threads);
  Emit(OutDir(c) / ("rmse_" + c.demo.chain + "_" + c.demo.constraint + ".csv"), s.report.ToCsv());
  std::cout << s.report.SummaryBlock();
  return 0;
}

int Compare(const ExperimentConfig& c) {
  const cmlearn::LearnedPipeline p = LearnPlanarXy(c);
  RunCompareAndEmit(c, c.compare, p.model);
  return 0;
}

int Table1(const ExperimentConfig& c) {
  std::string csv = "constraint,nmie_mean,nmie_sd\n";
  std::string summary;
  for (const char* con : {"xy", "xtheta", "ytheta"}) {
    cmlearn::DemoConfig demo = c.demo;
    demo.constraint = con;
    const cmlearn::NmieStudy s = cmlearn::RunNmieStudy(demo, c.seed, c.trials, c.learn, c.threads);
    const cmlearn::Summary sum = *s.report.NmieSummary();
    csv += std::string(con) + "," + cmlearn::FormatDouble(sum.mean) + "," + cmlearn::FormatDouble(sum.sd) + "\n";
    summary += s.report.SummaryBlock();
  }
  Emit(OutDir(c) / "table1.csv", csv);
  std::cout << summary;
  return 0;
}

int Figures(const ExperimentConfig& c) {
  const cmlearn::LearnedPipeline p = LearnPlanarXy(c);
  for (const char* name : {"compare1", "compare2"}) {
    cmlearn::CompareSpec spec = cmlearn::CompareScenario(name);
    spec.sim = c.compare.sim;
    spec.grad_step = c.compare.grad_step;
    RunCompareAndEmit(c, spec, p.model);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmlearn: learn constrained manipulability from demonstrations"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string data_path;
  auto* gen = app.add_subcommand("gen", "generate a demonstration dataset");
  auto* learn = app.add_subcommand("learn", "learn the constraint from a dataset");
  auto* nmie = app.add_subcommand("eval-nmie", "NMIE over repeated train/test trials");
  auto* rmse = app.add_subcommand("eval-rmse", "trajectory RMSE between true and learnt controllers");
  auto* compare = app.add_subcommand("compare", "singular-start policy comparison");
  auto* table1 = app.add_subcommand("table1", "NMIE table for the three planar constraints");
  auto* figures = app.add_subcommand("figures", "both comparison scenarios as CSV and SVG");
  for (auto* sub : {gen, learn, nmie, rmse, compare, table1, figures}) AddCommon(sub, flags);
  learn->add_option("--data", data_path, "dataset CSV written by gen (generated when absent)");
  compare->add_option_function<std::string>("--scenario", [&flags](const std::string& v) { flags.cli["scenario"] = v; },
                                            "compare1 | compare2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return Gen(Resolve(flags, "gen"));
    if (learn->parsed()) return Learn(Resolve(flags, "learn"), data_path);
    if (nmie->parsed()) return EvalNmie(Resolve(flags, "eval-nmie"));
    if (rmse->parsed()) return EvalRmse(Resolve(flags, "eval-rmse"));
    if (compare->parsed()) return Compare(Resolve(flags, "compare"));
    if (table1->parsed()) return Table1(Resolve(flags, "eval-nmie"));
    if (figures->parsed()) return Figures(Resolve(flags, "compare"));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cmlearn::IsNumerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
