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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmlearn/error.hpp"
#include "cmlearn/metrics.hpp"
#include "test_util.hpp"

using namespace cmlearn;
using cmlearn::testing::RandomVector;

TEST_CASE("NMIE of a constant offset on a three-point set") {
  // v = (1, 2, 3): mean 2, population variance 2/3. Offset c = 0.1 gives
  // 3 c^2 / (3 * 2/3) = 0.015.
  const std::vector<double> v{1, 2, 3}, vh{1.1, 2.1, 3.1};
  const NmieResult r = NmieFromValues(v, vh);
  CHECK(r.v_variance == doctest::Approx(2.0 / 3.0));
  CHECK(r.nmie == doctest::Approx(0.015));
  CHECK(r.n_points == 3);
}

TEST_CASE("NMIE is zero for the true model and permutation invariant") {
  const SerialChain c = SerialChain::Preset("planar3");
  CounterRng rng(0x11);
  std::vector<JointState> qs;
  for (int n = 0; n < 100; ++n) qs.push_back(RandomVector(rng, 3, -kPi, kPi));
  for (const char* id : {"xy", "xtheta", "ytheta"}) {
    const ConstraintModel m = ConstraintModel::Preset(c, id);
    CHECK(Nmie(m, m, c, qs).nmie == 0.0);
  }
  Eigen::MatrixXd tilted(2, 3);
  tilted << 1, 0, 0.05, 0, 1, 0;
  const ConstraintModel truth = ConstraintModel::Preset(c, "xy");
  const ConstraintModel other = ConstraintModel(tilted).Normalized();
  const double base = Nmie(truth, other, c, qs).nmie;
  std::vector<JointState> shuffled(qs.rbegin(), qs.rend());
  std::rotate(shuffled.begin(), shuffled.begin() + 37, shuffled.end());
  CHECK(Nmie(truth, other, c, shuffled).nmie == doctest::Approx(base).epsilon(1e-12));
  CHECK(base > 0.0);
}

TEST_CASE("NMIE errors") {
  const std::vector<double> flat{1, 1, 1};
  CHECK_THROWS_AS(NmieFromValues(flat, flat), Error);
  try {
    NmieFromValues(flat, flat);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroVariance);
  }
  const std::vector<double> one{1};
  CHECK_THROWS_AS(NmieFromValues(one, one), Error);
}

TEST_CASE("summary statistics") {
  const std::vector<double> ones{1, 1, 1}, two{0, 2}, single{4};
  CHECK(Summarize(ones).mean == 1.0);
  CHECK(Summarize(ones).sd == 0.0);
  CHECK(Summarize(two).mean == 1.0);
  CHECK(Summarize(two).sd == doctest::Approx(std::sqrt(2.0)));
  CHECK(Summarize(single).sd == 0.0);
  CHECK(Summarize(single).single);
  CHECK_THROWS_AS(Summarize(std::vector<double>{}), Error);
}

TEST_CASE("trajectory RMSE") {
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel m = ConstraintModel::Preset(c, "xy");
  const Eigen::Vector3d q0(Deg(5), Deg(95), Deg(5));
  const Eigen::Vector3d target(0.5, 1.2, 0);
  const RmseResult same = TrajectoryRmse(c, m, m, q0, target);
  CHECK(!same.diverged);
  CHECK(same.rmse == 0.0);

  Eigen::MatrixXd tilted(2, 3);
  tilted << 1, 0, 0.2, 0, 1, 0;
  const ConstraintModel other = ConstraintModel(tilted).Normalized();
  const RmseResult diff = TrajectoryRmse(c, m, other, q0, target);
  CHECK(diff.rmse > 0.0);

  std::vector<JointState> a{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
  std::vector<JointState> b{Eigen::Vector2d(0, 2), Eigen::Vector2d(1, 1)};
  // sqrt((0 + 4 + 0 + 0) / 4)
  CHECK(StateRmse(a, b) == doctest::Approx(1.0));
  CHECK(StateRmse(a, b) == StateRmse(b, a));
}

TEST_CASE("evaluation report export") {
  EvalReport r;
  r.label = "demo";
  r.nmie = {1e-6, 3e-6};
  r.v_variance = {0.5, 0.6};
  r.n_points = {1000, 1000};
  const std::string csv = r.ToCsv();
  CHECK(csv.rfind("trial,nmie,rmse,v_variance,n_points\n", 0) == 0);
  CHECK(csv.find("1,3.0000000000000001e-06,,0.59999999999999998,1000") != std::string::npos);
  CHECK(r.SummaryBlock().find("nmie  mean 2.000e-06") != std::string::npos);
  CHECK(!r.RmseSummary().has_value());
}
