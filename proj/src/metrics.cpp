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

#include "cmlearn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cmlearn/error.hpp"
#include "cmlearn/policies.hpp"

namespace cmlearn {

NmieResult NmieFromValues(std::span<const double> v, std::span<const double> v_hat) {
  if (v.size() != v_hat.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "true and learnt index counts differ");
  }
  if (v.size() < 2) throw Error(ErrorCode::kInvalidArgument, "NMIE needs at least two test states");
  const auto n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) {
    throw Error(ErrorCode::kZeroVariance, "true manipulability is constant on the test set");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sq += (v[i] - v_hat[i]) * (v[i] - v_hat[i]);
  return {sq / (n * var), var, static_cast<int>(v.size())};
}

NmieResult Nmie(const ConstraintModel& truth, const ConstraintModel& learned,
                const SerialChain& chain, std::span<const JointState> test_states) {
  std::vector<double> v, vh;
  v.reserve(test_states.size());
  vh.reserve(test_states.size());
  for (const auto& q : test_states) {
    v.push_back(Manipulability(truth, chain, q));
    vh.push_back(Manipulability(learned, chain, q));
  }
  return NmieFromValues(v, vh);
}

double StateRmse(std::span<const JointState> a, std::span<const JointState> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "state sequences differ in length or are empty");
  }
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) {
      throw Error(ErrorCode::kDimensionMismatch, "states differ in dimension");
    }
    sq += (a[i] - b[i]).squaredNorm();
    count += static_cast<std::size_t>(a[i].size());
  }
  return std::sqrt(sq / static_cast<double>(count));
}

RmseResult TrajectoryRmse(const SerialChain& chain, const ConstraintModel& truth,
                          const ConstraintModel& learned, const JointState& start,
                          const TaskPose& target, const RmseOptions& options) {
  const TaskPolicy b{target};
  const auto run = [&](const ConstraintModel& ascended) {
    return Simulate(chain, truth, b,
                    NullPolicy::ManipGradient(ascended, options.alpha, options.grad_step),
                    options.pinv, start, options.steps, options.dt, truth, options.sim);
  };
  const SimOutcome a = run(truth);
  const SimOutcome l = run(learned);
  RmseResult r;
  r.true_status = a.status;
  r.learned_status = l.status;
  r.diverged = a.status == SimStatus::kDiverged || l.status == SimStatus::kDiverged ||
               a.trajectory.states.size() != l.trajectory.states.size();
  if (!r.diverged) r.rmse = StateRmse(a.trajectory.states, l.trajectory.states);
  return r;
}

Summary Summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot summarise an empty list");
  Summary s;
  s.n = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n == 1) {
    s.single = true;
    return s;
  }
  double sq = 0.0;
  for (double x : values) sq += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(sq / (s.n - 1));
  return s;
}

std::optional<Summary> EvalReport::NmieSummary() const {
  if (nmie.empty()) return std::nullopt;
  return Summarize(nmie);
}

std::optional<Summary> EvalReport::RmseSummary() const {
  if (rmse.empty()) return std::nullopt;
  return Summarize(rmse);
}

namespace {

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out << "trial,nmie,rmse,v_variance,n_points\n";
  const std::size_t n = std::max(nmie.size(), rmse.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',' << (i < nmie.size() ? Num(nmie[i]) : "") << ','
        << (i < rmse.size() ? Num(rmse[i]) : "") << ','
        << (i < v_variance.size() ? Num(v_variance[i]) : "") << ','
        << (i < n_points.size() ? std::to_string(n_points[i]) : "") << '\n';
  }
  return out.str();
}

std::string EvalReport::SummaryBlock() const {
  std::ostringstream out;
  char buf[160];
  out << "== " << (label.empty() ? "evaluation" : label) << " ==\n";
  if (auto s = NmieSummary()) {
    std::snprintf(buf, sizeof buf, "nmie  mean %.3e  sd %.3e  trials %d%s\n", s->mean, s->sd,
                  s->n, s->single ? " (single)" : "");
    out << buf;
  }
  if (auto s = RmseSummary()) {
    std::snprintf(buf, sizeof buf, "rmse  mean %.3e  sd %.3e  trials %d%s\n", s->mean, s->sd,
                  s->n, s->single ? " (single)" : "");
    out << buf;
  }
  if (excluded > 0) out << "excluded (diverged): " << excluded << '\n';
  return out.str();
}

}  // namespace cmlearn
