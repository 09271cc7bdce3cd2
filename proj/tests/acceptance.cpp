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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
// any line fails. Thresholds are fixed here and never tuned to results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmlearn/experiments.hpp"
#include "cmlearn/io.hpp"
#include "cmlearn/policies.hpp"
#include "test_util.hpp"

using namespace cmlearn;
using cmlearn::testing::FdJacobian;
using cmlearn::testing::RandomMatrix;
using cmlearn::testing::RandomVector;

namespace {

constexpr std::uint64_t kSeed = 7;

int failures = 0;

template <typename... Args>
std::string Fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void Report(bool ok, const std::string& id, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

const char* Name(SimStatus s) { return SimStatusName(s).data(); }

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 6: 100-case sweeps with fixed seeds. Each line reports the
// worst violation seen.
void Invariants() {
  const SerialChain planar = SerialChain::Preset("planar3");
  const SerialChain spatial = SerialChain::Preset("spatial7");
  const char* kIds[] = {"xy", "xtheta", "ytheta"};

  {
    CounterRng rng(0xC601);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const ConstraintModel m = ConstraintModel::Preset(planar, kIds[n % 3]);
      const Eigen::MatrixXd a = ConstraintMatrix(m, planar, RandomVector(rng, 3, -kPi, kPi));
      const Eigen::MatrixXd p = NullspaceProjector(a, PinvPolicy::Truncate());
      worst = std::max({worst, (p * p - p).cwiseAbs().maxCoeff(), (a * p).cwiseAbs().maxCoeff()});
    }
    Report(worst < 1e-10, "C6 projector idempotent and annihilated", Fmt("max error %.2e (tol 1e-10)", worst));
  }
  {
    CounterRng rng(0xC602);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Eigen::MatrixXd a = RandomMatrix(rng, 1 + n % 3, 3 + n % 5);
      for (const PinvPolicy& pol : {PinvPolicy::Plain(), PinvPolicy::Truncate()}) {
        const Eigen::MatrixXd p = Pseudoinverse(a, pol);
        worst = std::max({worst, (a * p * a - a).cwiseAbs().maxCoeff(), (p * a * p - p).cwiseAbs().maxCoeff(),
                          ((a * p).transpose() - a * p).cwiseAbs().maxCoeff(),
                          ((p * a).transpose() - p * a).cwiseAbs().maxCoeff()});
      }
    }
    Report(worst < 1e-10, "C6 Moore-Penrose axioms", Fmt("max error %.2e (tol 1e-10)", worst));
  }
  {
    CounterRng rng(0xC603);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const SerialChain& c = n % 2 == 0 ? planar : spatial;
      const JointState q = RandomVector(rng, c.dof(), -2 * kPi, 2 * kPi);
      worst = std::max(worst, (c.Jacobian(q) - FdJacobian(c, q)).cwiseAbs().maxCoeff());
    }
    Report(worst < 1e-6, "C6 analytic vs finite-difference Jacobian", Fmt("max error %.2e (tol 1e-6)", worst));
  }
  {
    CounterRng rng(0xC604);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const ConstraintModel m = ConstraintModel::Preset(planar, kIds[n % 3]);
      const TaskPolicy b{Eigen::Vector3d(rng.Uniform(-1, 1), rng.Uniform(0, 2), rng.Uniform(0, kPi))};
      const NullPolicy p = NullPolicy::PointAttractor(RandomVector(rng, 3, -kPi, kPi));
      const SimOutcome o = Simulate(planar, m, b, p, PinvPolicy::Truncate(), RandomVector(rng, 3, -kPi, kPi), 20, 0.02);
      for (std::size_t t = 0; t < o.trajectory.actions.size(); ++t) {
        const JointState& q = o.trajectory.states[t];
        if (Manipulability(m, planar, q) < 1e-3) continue;
        const Eigen::VectorXd r = ConstraintMatrix(m, planar, q) * o.trajectory.actions[t] - TaskPolicyVector(b, planar, m, q);
        worst = std::max(worst, r.norm());
      }
    }
    Report(worst < 1e-8, "C6 constraint residual along trajectories", Fmt("max |A u - b| %.2e (tol 1e-8)", worst));
  }
  {
    CounterRng rng(0xC605);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const ConstraintModel m = ConstraintModel::Preset(planar, kIds[n % 3]);
      std::vector<Eigen::MatrixXd> f;
      std::vector<Eigen::VectorXd> w;
      for (int i = 0; i < 10; ++i) {
        const JointState q = RandomVector(rng, 3, -kPi, kPi);
        f.push_back(planar.Jacobian(q));
        w.push_back(NullspaceProjector(ConstraintMatrix(m, planar, q), PinvPolicy::Truncate()) *
                    RandomVector(rng, 3, -1, 1));
      }
      worst = std::max(worst, ConstraintObjective(m.lambda(), f, w));
    }
    Report(worst < 1e-12, "C6 learning objective zero at ground truth", Fmt("max objective %.2e (tol 1e-12)", worst));
  }
  {
    CounterRng rng(0xC606);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Eigen::MatrixXd lambda = RandomMatrix(rng, 2, 3);
      const Eigen::MatrixXd r = RandomMatrix(rng, 2, 2).householderQr().householderQ();
      const JointState q = RandomVector(rng, 3, -kPi, kPi);
      worst = std::max(worst, std::abs(Manipulability(ConstraintModel(lambda), planar, q) -
                                       Manipulability(ConstraintModel(Eigen::MatrixXd(r * lambda)), planar, q)));
    }
    Report(worst < 1e-10, "C6 index invariant under orthogonal row mixing", Fmt("max difference %.2e (tol 1e-10)", worst));
  }
  {
    int mismatches = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      DemoConfig cfg = DemoConfig::PlanarDefaults(kIds[seed % 3]);
      cfg.seed = seed;
      cfg.n_trajectories = 3;
      const DemonstrationSet a = GenerateDemos(cfg, 1);
      const DemonstrationSet b = ParseDataset(DatasetCsv(a), DatasetMeta(a));
      for (std::size_t t = 0; t < a.trajectories.size(); ++t) {
        for (std::size_t k = 0; k < a.trajectories[t].states.size(); ++k) {
          mismatches += !(a.trajectories[t].states[k].array() == b.trajectories[t].states[k].array()).all();
          mismatches += !(a.trajectories[t].actions[k].array() == b.trajectories[t].actions[k].array()).all();
        }
      }
      LambdaEstimate e;
      CounterRng rng(seed);
      e.rows = RandomMatrix(rng, 3, 3).householderQr().householderQ();
      e.rows.conservativeResize(2, 3);
      e.k = 2;
      e.objective_value = rng.NextUnit();
      const ModelFile back = ParseModel(ModelText({"planar3", e, seed}));
      mismatches += !(back.estimate.rows.array() == e.rows.array()).all();
      mismatches += back.estimate.objective_value != e.objective_value;
    }
    Report(mismatches == 0, "C6 serialization round trips exact", Fmt("%d mismatching values over 100 datasets and models", mismatches));
  }
}

const SimOutcome& Run(const CompareResult& r, const std::string& policy) {
  for (const auto& run : r.runs) {
    if (run.policy == policy) return run.outcome;
  }
  throw std::runtime_error("missing run " + policy);
}

ConstraintModel LearnedXy() {
  DemoConfig demo = DemoConfig::PlanarDefaults("xy");
  demo.seed = kSeed;
  return LearnFromDemos(GenerateDemos(demo), {}).model;
}

void Compare1(const ConstraintModel& learned) {
  const CompareResult r = RunCompare(CompareScenario("compare1"), learned);
  const SerialChain c = SerialChain::Preset("planar3");
  const SimOutcome& zero = Run(r, "zero");
  const SimOutcome& grad = Run(r, "manip_gradient");
  const SimOutcome& pa = Run(r, "point_attractor");

  const auto& zs = zero.trajectory.states;
  const bool long_enough = zs.size() > 200;
  const double progress =
      (c.ForwardKinematics(zs[std::min<std::size_t>(200, zs.size() - 1)]) - c.ForwardKinematics(zs.front()))
          .head(2)
          .norm();
  Report(zero.status == SimStatus::kStuck && long_enough && progress < 1e-9, "C3 compare1 zero policy stuck",
         Fmt("status %s, end-effector displacement over 200 steps %.2e m", Name(zero.status), progress));

  bool monotone = grad.manip_trace.size() > 10;
  for (std::size_t t = 0; monotone && t < 10; ++t) monotone = grad.manip_trace[t + 1] >= grad.manip_trace[t];
  Report(grad.status == SimStatus::kCompleted && grad.reached && monotone, "C3 compare1 learnt gradient completes",
         Fmt("status %s, reached %s, v over steps 0..10 %s, v(0) %.2e v(10) %.3f", Name(grad.status),
             grad.reached ? "yes" : "no", monotone ? "nondecreasing" : "NOT monotone", grad.manip_trace.front(),
             grad.manip_trace.size() > 10 ? grad.manip_trace[10] : NAN));

  const double min_pa = MinAfterStart(pa.manip_trace), min_grad = MinAfterStart(grad.manip_trace);
  Report(pa.status == SimStatus::kCompleted && pa.reached && min_pa < 0.25 * min_grad,
         "C3 compare1 attractor dips toward singularity",
         Fmt("status %s, reached %s, min v %.4f vs gradient %.4f, ratio %.3f (bar < 0.25)", Name(pa.status),
             pa.reached ? "yes" : "no", min_pa, min_grad, min_pa / min_grad));
}

void Compare2(const ConstraintModel& learned) {
  const CompareResult r = RunCompare(CompareScenario("compare2"), learned);
  const SimOutcome& pa = Run(r, "point_attractor");
  const double qmax = pa.trajectory.states.back().cwiseAbs().maxCoeff();
  Report(pa.status == SimStatus::kDiverged && pa.trajectory.actions.size() <= 5 && qmax > 1e9,
         "C4 compare2 attractor diverges",
         Fmt("status %s after %zu step(s), max |q| %.3e rad", Name(pa.status), pa.trajectory.actions.size(), qmax));
  for (const char* policy : {"zero", "manip_gradient"}) {
    const SimOutcome& o = Run(r, policy);
    const bool finite = o.status != SimStatus::kDiverged && o.trajectory.actions.size() == 200;
    Report(finite, std::string("C4 compare2 ") + policy + " stays finite",
           Fmt("status %s after %zu step(s), max |q| %.3e rad (limit 1e9)", Name(o.status),
               o.trajectory.actions.size(), o.trajectory.states.back().cwiseAbs().maxCoeff()));
  }
}

void ControllerRmse() {
  const auto t0 = std::chrono::steady_clock::now();
  RmseOptions opt;
  opt.steps = 100;
  opt.dt = 0.02;
  const RmseStudy s = RunRmseStudy(DemoConfig::PlanarDefaults("xy"), kSeed, 20, opt, {});
  if (s.report.rmse.empty()) {
    Report(false, "C2 controller RMSE xy", "every trajectory diverged");
    return;
  }
  const Summary sum = *s.report.RmseSummary();
  Report(sum.mean < 1e-3 && sum.sd < 1e-3 && s.report.excluded == 0, "C2 controller RMSE xy",
         Fmt("mean %.3e sd %.3e rad over %zu reaches of 100 steps, %d diverged (bar 1e-3 each), %.0f s", sum.mean,
             sum.sd, s.report.rmse.size(), s.report.excluded, Seconds(t0)));
}

void Spatial7() {
  const auto t0 = std::chrono::steady_clock::now();
  const int trials = 5;
  const NmieStudy s = RunNmieStudy(DemoConfig::Spatial7Defaults("x"), kSeed, trials, {});
  const double worst = *std::max_element(s.report.nmie.begin(), s.report.nmie.end());
  const int rank_ok = static_cast<int>(std::count(s.k.begin(), s.k.end(), 1));
  Report(worst < 1e-2 && rank_ok == trials, "C5 spatial7 x constraint",
         Fmt("worst nmie %.3e, mean %.3e over %d trials (bar 1e-2), k=1 in %d/%d, %.0f s", worst,
             Summarize(s.report.nmie).mean, trials, rank_ok, trials, Seconds(t0)));
}

void TableNmie() {
  for (const char* con : {"xy", "xtheta", "ytheta"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const NmieStudy s = RunNmieStudy(DemoConfig::PlanarDefaults(con), kSeed, 50, {});
    const Summary sum = *s.report.NmieSummary();
    const int rank_ok = static_cast<int>(std::count(s.k.begin(), s.k.end(), 2));
    const double worst = *std::max_element(s.report.nmie.begin(), s.report.nmie.end());
    Report(sum.mean < 1e-5, std::string("C1 table nmie ") + con,
           Fmt("mean %.3e sd %.3e worst %.3e over 50 trials (bar mean < 1e-5), k=2 in %d/50, %.0f s", sum.mean,
               sum.sd, worst, rank_ok, Seconds(t0)));
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite, seed %llu\n", static_cast<unsigned long long>(kSeed));
  try {
    Invariants();
    const ConstraintModel learned = LearnedXy();
    Compare1(learned);
    Compare2(learned);
    ControllerRmse();
    Spatial7();
    TableNmie();
  } catch (const std::exception& e) {
    Report(false, "suite aborted", e.what());
  }
  std::printf("%d failing line(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
