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

#include <cstdlib>
#include <filesystem>
#include <regex>

#include "cmlearn/config.hpp"
#include "cmlearn/error.hpp"
#include "cmlearn/io.hpp"
#include "test_util.hpp"

using namespace cmlearn;
using cmlearn::testing::RandomVector;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cmlearn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

DemonstrationSet SmallSet(std::uint64_t seed) {
  DemoConfig cfg = DemoConfig::PlanarDefaults("xtheta");
  cfg.seed = seed;
  cfg.n_trajectories = 7;
  return GenerateDemos(cfg);
}

int CountOf(const std::string& s, const std::string& what) {
  int n = 0;
  for (std::size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("dataset round trip is bit exact, 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DemonstrationSet a = SmallSet(seed);
    const DemonstrationSet b = ParseDataset(DatasetCsv(a), DatasetMeta(a));
    REQUIRE(b.trajectories.size() == a.trajectories.size());
    for (std::size_t t = 0; t < a.trajectories.size(); ++t) {
      const Trajectory &x = a.trajectories[t], &y = b.trajectories[t];
      REQUIRE(x.states.size() == y.states.size());
      CHECK(x.dt == y.dt);
      CHECK(x.meta.seed == y.meta.seed);
      for (std::size_t k = 0; k < x.states.size(); ++k) {
        CHECK((x.states[k].array() == y.states[k].array()).all());
        CHECK((x.actions[k].array() == y.actions[k].array()).all());
      }
    }
    CHECK(b.config.seed == a.config.seed);
    CHECK((b.config.psi_star.array() == a.config.psi_star.array()).all());
    CHECK(b.config.target[2].hi == a.config.target[2].hi);
    CHECK(DatasetCsv(b) == DatasetCsv(a));
  }
}

TEST_CASE("dataset files on disk") {
  const fs::path dir = TempDir("dataset");
  const DemonstrationSet a = SmallSet(3);
  WriteDataset(dir / "d.csv", a);
  CHECK(fs::exists(dir / "d.csv.meta"));
  CHECK(!fs::exists(dir / "d.csv.tmp"));
  CHECK(DatasetCsv(ReadDataset(dir / "d.csv")) == DatasetCsv(a));
  CHECK_THROWS_AS(ReadDataset(dir / "missing.csv"), Error);
}

TEST_CASE("dataset parse errors") {
  const DemonstrationSet a = SmallSet(4);
  const std::string meta = DatasetMeta(a);
  std::string csv = DatasetCsv(a);
  try {
    ParseDataset("", meta);
    FAIL("empty file accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("empty") != std::string::npos);
  }
  try {
    ParseDataset("traj,step\n0,0\n", meta);
    FAIL("bad header accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("traj_id,step,q_1,q_2,q_3,u_1,u_2,u_3,dt") != std::string::npos);
  }
  std::string broken = csv;
  const std::size_t third_line = broken.find('\n', broken.find('\n') + 1) + 1;
  broken.insert(third_line, "0,2,oops\n");
  try {
    ParseDataset(broken, meta);
    FAIL("malformed row accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("dataset:3:") != std::string::npos);
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("model round trip, 100 probe states") {
  LambdaEstimate e;
  Eigen::MatrixXd rows(2, 3);
  rows << 0.6, 0.8, 0.0, -0.8, 0.6, 1e-7;
  e.rows = rows;
  e.rows.row(1).normalize();
  e.k = 2;
  e.angles = {Eigen::Vector2d(0.1, 0.2), Eigen::VectorXd::Constant(1, 0.3)};
  e.objective_value = 1.2345678901234567e-7;
  e.reference = 876.5;
  e.objective_trace = {1e-8, 1.2345678901234567e-7, 876.5};
  const ModelFile m{"planar3", e, LearnerConfigHash({}, {})};
  const ModelFile back = ParseModel(ModelText(m));
  CHECK((back.estimate.rows.array() == e.rows.array()).all());
  CHECK(back.config_hash == m.config_hash);
  CHECK(back.estimate.objective_trace == e.objective_trace);
  CHECK(ModelText(back) == ModelText(m));
  const SerialChain c = SerialChain::Preset("planar3");
  const ConstraintModel a = LearnedModel(e), b = LearnedModel(back.estimate);
  CounterRng rng(0x10);
  for (int n = 0; n < 100; ++n) {
    const JointState q = RandomVector(rng, 3, -kPi, kPi);
    CHECK(std::abs(Manipulability(a, c, q) - Manipulability(b, c, q)) <= 1e-12);
  }
  const fs::path dir = TempDir("model");
  WriteModel(dir / "m.txt", m);
  CHECK(ModelText(ReadModel(dir / "m.txt")) == ModelText(m));
}

TEST_CASE("model parse errors") {
  LambdaEstimate e;
  e.rows = Eigen::MatrixXd::Identity(1, 3);
  e.k = 1;
  const std::string text = ModelText({"planar3", e, 1});
  CHECK_THROWS_AS(ParseModel(text.substr(0, text.size() / 2)), Error);
  const std::string no_k = std::regex_replace(text, std::regex("k = 1\n"), "");
  try {
    ParseModel(no_k);
    FAIL("missing k accepted");
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("'k'") != std::string::npos);
  }
  const std::string v2 = std::regex_replace(text, std::regex("version = 1"), "version = 2");
  try {
    ParseModel(v2);
    FAIL("wrong version accepted");
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("version") != std::string::npos);
  }
  CHECK(LearnerConfigHash({}, {}) != LearnerConfigHash({}, LearnOptions{.rank_epsilon = 1e-4}));
}

TEST_CASE("svg plot panels") {
  std::vector<PlotTrace> traces;
  for (int p = 0; p < 3; ++p) {
    PlotTrace t;
    t.label = "policy" + std::to_string(p);
    for (int k = 0; k < 100; ++k) {
      t.path.emplace_back(0.01 * k, p + 0.02 * k);
      t.manip.push_back(1.0 + p + 0.01 * k);
    }
    traces.push_back(t);
  }
  const std::string svg = RenderSvg(traces, "demo");
  CHECK(CountOf(svg, "<polyline") == 6);
  CHECK(CountOf(svg, "class=\"legend\"") == 3);
  CHECK(CountOf(svg, "class=\"panel\"") == 2);
  // Step axis spans 0..99 padded by 5%: labels -4.95 and 104.
  CHECK(svg.find(">-4.95<") != std::string::npos);
  CHECK(svg.find(">104<") != std::string::npos);

  traces[1].manip.resize(1);
  CHECK_THROWS_AS(RenderSvg(traces, "short"), Error);
  CHECK_THROWS_AS(RenderSvg(std::vector<PlotTrace>{}, "none"), Error);
}

TEST_CASE("output root and atomic writes") {
  const fs::path dir = TempDir("root");
  ::setenv(kOutputRootEnv, dir.c_str(), 1);
  CHECK(ResolveOutputDir("runs") == dir / "runs");
  CHECK(ResolveOutputDir("/abs") == fs::path("/abs"));
  ::unsetenv(kOutputRootEnv);
  CHECK(ResolveOutputDir("runs") == fs::path("runs"));
  WriteFileAtomic(dir / "a" / "b.txt", "one");
  WriteFileAtomic(dir / "a" / "b.txt", "two");
  CHECK(ReadFile(dir / "a" / "b.txt") == "two");
  CHECK(FormatDouble(0.1) == "0.10000000000000001");
}

TEST_CASE("experiment config parsing") {
  using nlohmann::json;
  CHECK_THROWS_AS(ConfigFromJson(json{{"chain", "planar3"}}), Error);
  CHECK_THROWS_AS(ConfigFromJson(json{{"seed", 1}, {"colour", "red"}}), Error);
  CHECK_THROWS_AS(ConfigFromJson(json{{"seed", 1}, {"chain", "delta"}}), Error);
  CHECK_THROWS_AS(ConfigFromJson(json{{"seed", 1}, {"pinv", "fuzzy"}}), Error);
  CHECK_THROWS_AS(ConfigFromJson(json{{"seed", "seven"}}), Error);
  const ExperimentConfig c = ConfigFromJson(json{{"seed", 7},
                                                 {"experiment", "eval-rmse"},
                                                 {"constraint", "ytheta"},
                                                 {"psi_star_deg", {1, 2, 3}},
                                                 {"rbf_ridge", 1e-9},
                                                 {"rank_epsilon", 1e-4},
                                                 {"stuck_window", 9},
                                                 {"pinv", "plain"}});
  CHECK(c.kind == ExperimentKind::kEvalRmse);
  CHECK(c.demo.seed == 7);
  CHECK(c.demo.constraint == "ytheta");
  CHECK(c.demo.psi_star[2] == doctest::Approx(Deg(3)));
  CHECK(c.learn.separation.ridge == 1e-9);
  CHECK(c.learn.learn.rank_epsilon == 1e-4);
  CHECK(c.rmse.sim.stuck_window == 9);
  CHECK(c.rmse.pinv.mode == PinvMode::kPlain);
  const ExperimentConfig s = ConfigFromJson(json{{"seed", 1}, {"chain", "spatial7"}});
  CHECK(s.demo.constraint == "x");
  CHECK(s.demo.n_trajectories == 50);
  CHECK_THROWS_AS(LoadConfigJson("/nonexistent/missing.cfg"), Error);
}
