// Copyright 2026 The mftrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mftrl/experiment.h"

namespace mftrl {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

fs::path TempDir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mftrl_" + name);
  fs::remove_all(d);
  return d;
}

ExperimentConfig Small() {
  ExperimentConfig cfg;
  cfg.iterations = 2000;
  cfg.record_every = 100;
  cfg.seeds = {0, 1, 2, 3};
  return cfg;
}

TEST_CASE("seed and list parsing") {
  CHECK(ParseSeeds("0..3") == std::vector<std::int64_t>{0, 1, 2, 3});
  CHECK(ParseSeeds("5") == std::vector<std::int64_t>{5});
  CHECK(ParseSeeds("1, 4,9") == std::vector<std::int64_t>{1, 4, 9});
  CHECK(ParseSeeds("0..99").size() == 100);
  CHECK_THROWS_AS(ParseSeeds("3..1"), ConfigError);
  CHECK_THROWS_AS(ParseSeeds("a"), ConfigError);
  CHECK(ParseRealList("1e-3,0.5") == std::vector<double>{1e-3, 0.5});
  CHECK_THROWS_AS(ParseRealList("1,,2"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig ok;
  CHECK_NOTHROW(ok.Validate());
  auto bad = [](auto edit) {
    ExperimentConfig c;
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.algo = "cfr"; }).Validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.eta = 0; }).Validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.mu = 0; }).Validate(), ConfigError);
  CHECK_NOTHROW(bad([](auto& c) {
                  c.mu = 0;
                  c.algo = "ftrl";
                }).Validate());
  CHECK_THROWS_AS(bad([](auto& c) { c.reference = "1,0,0"; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.record_every = c.iterations + 1; })
                      .Validate(),
                  ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.refresh_period = c.iterations + 1; })
                      .Validate(),
                  ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.iterations = 0; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(bad([](auto& c) { c.seeds.clear(); }).Validate(),
                  ConfigError);
  CHECK(DefaultRecordEvery("full") == 100);
  CHECK(DefaultRecordEvery("bandit") == 1000);
}

TEST_CASE("config round trip") {
  ExperimentConfig cfg;
  cfg.game = "meq";
  cfg.algo = "oftrl";
  cfg.regularizer = "euclidean";
  cfg.feedback = "bandit";
  cfg.eta = 1e-4;
  cfg.mu = 0.123456789;
  cfg.reference = "0.2,0.3,0.5;0.4,0.6";
  cfg.refresh_period = 40;
  cfg.iterations = 12345;
  cfg.record_every = 5;
  cfg.seeds = {3, 1, 4};
  cfg.initial = "uniform";
  cfg.output_dir = "out/x";
  cfg.workers = 2;
  CHECK(ExperimentConfig::FromJson(cfg.ToJson()) == cfg);
  const fs::path dir = TempDir("roundtrip");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "cfg.json");
    f << cfg.ToJson();
  }
  CHECK(ExperimentConfig::FromFile((dir / "cfg.json").string()) == cfg);
  CHECK(cfg.Hash() == ExperimentConfig::FromJson(cfg.ToJson()).Hash());
  CHECK(cfg.Hash().size() == 16);
  ExperimentConfig other = cfg;
  other.eta = 2e-4;
  CHECK(other.Hash() != cfg.Hash());
  fs::remove_all(dir);

  const ExperimentConfig partial =
      ExperimentConfig::FromJson(R"({"mu": 0.5, "seeds": "0..2"})");
  CHECK(partial.mu == 0.5);
  CHECK(partial.seeds == std::vector<std::int64_t>{0, 1, 2});
  CHECK(partial.game == "brps");
  CHECK_THROWS_AS(ExperimentConfig::FromJson(R"({"learning_rate": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::FromJson("{"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::FromFile("/no/such/config.json"),
                  ConfigError);
}

TEST_CASE("reference resolution") {
  const GameMatrix g = MakeMultipleEquilibria();
  const auto [c1, c2] = ResolveReference("0.2,0.3,0.5;0.4,0.6", g);
  CHECK(c1 == MixedStrategy({0.2, 0.3, 0.5}));
  CHECK(c2 == MixedStrategy({0.4, 0.6}));
  const auto [u1, u2] = ResolveReference("uniform", g);
  CHECK(u2 == MixedStrategy::Uniform(2));
  CHECK_THROWS_AS(ResolveReference("0.5,0.5", g), ConfigError);
}

TEST_CASE("record counts") {
  ExperimentConfig cfg;
  cfg.iterations = 100;
  cfg.record_every = 100;
  const auto r = RunExperiment(cfg);
  REQUIRE(r.size() == 1);
  CHECK(r[0].metrics.rows.size() == 2);
  CHECK(r[0].metrics.rows[0].iteration == 0);
  CHECK(r[0].metrics.rows[1].iteration == 100);
}

TEST_CASE("metric and trajectory invariants") {
  ExperimentConfig cfg = Small();
  cfg.game = "random:3x4";
  const auto results = RunExperiment(cfg);
  for (const SeedResult& r : results) {
    CHECK(r.trajectory.config_hash == cfg.Hash());
    for (const MetricRow& row : r.metrics.rows) {
      CHECK(row.exploitability >= -1e-9);
      CHECK(row.kl_to_stationary.has_value());
    }
    for (const TrajectoryPoint& pt : r.trajectory.points) {
      double s1 = 0, s2 = 0;
      for (double v : pt.profile.p1.probs()) s1 += v;
      for (double v : pt.profile.p2.probs()) s2 += v;
      CHECK(std::abs(s1 - 1) <= 1e-9);
      CHECK(std::abs(s2 - 1) <= 1e-9);
    }
  }
  // Random games differ across seeds.
  CHECK_FALSE(results[0].metrics.rows[0].exploitability ==
              results[1].metrics.rows[0].exploitability);
}

TEST_CASE("kl to the rest point only for fixed-reference M-FTRL") {
  ExperimentConfig cfg = Small();
  cfg.seeds = {0};
  cfg.refresh_period = 500;
  for (const auto& row : RunExperiment(cfg)[0].metrics.rows) {
    CHECK_FALSE(row.kl_to_stationary.has_value());
  }
  cfg.refresh_period.reset();
  cfg.algo = "ftrl";
  for (const auto& row : RunExperiment(cfg)[0].metrics.rows) {
    CHECK_FALSE(row.kl_to_stationary.has_value());
  }
}

TEST_CASE("files, headers and determinism") {
  const fs::path a = TempDir("det_a"), b = TempDir("det_b");
  ExperimentConfig cfg = Small();
  cfg.output_dir = a.string();
  cfg.workers = 3;
  RunExperiment(cfg);
  cfg.output_dir = b.string();
  cfg.workers = 1;
  RunExperiment(cfg);
  for (const char* name : {"metrics_seed0.csv", "metrics_seed3.csv",
                           "trajectory_seed2.csv", "metrics_mean.csv"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(ReadFile(a / name) == ReadFile(b / name));
  }
  CHECK(Lines(ReadFile(a / "metrics_seed0.csv"))[0] ==
        "seed,iteration,exploitability,kl_to_stationary");
  CHECK(Lines(ReadFile(a / "trajectory_seed0.csv"))[0] ==
        "seed,iteration,player,action,probability");
  CHECK(Lines(ReadFile(a / "metrics_mean.csv"))[0] ==
        "iteration,exploitability,kl_to_stationary");
  const auto cfg_back =
      ExperimentConfig::FromFile((a / "config.json").string());
  CHECK(cfg_back.seeds == cfg.seeds);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("empty record sets give header-only files") {
  const fs::path d = TempDir("empty");
  EmitMetricsCsv({}, (d / "m.csv").string());
  EmitTrajectoryCsv({}, (d / "t.csv").string());
  EmitAggregateCsv({}, (d / "a.csv").string());
  EmitSweepCsv({}, (d / "s.csv").string());
  CHECK(ReadFile(d / "m.csv") == std::string(kMetricsHeader) + "\n");
  CHECK(ReadFile(d / "t.csv") == std::string(kTrajectoryHeader) + "\n");
  CHECK(ReadFile(d / "a.csv") == std::string(kAggregateHeader) + "\n");
  CHECK(ReadFile(d / "s.csv") == std::string(kSweepHeader) + "\n");
  fs::remove_all(d);
  CHECK_THROWS(EmitMetricsCsv({}, "/proc/forbidden/m.csv"));
}

TEST_CASE("aggregate is the mean of the per-seed columns") {
  const auto results = RunExperiment(Small());
  const auto mean = Aggregate(results);
  REQUIRE(mean.size() == results[0].metrics.rows.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    double e = 0, kl = 0;
    for (const auto& r : results) {
      e += r.metrics.rows[i].exploitability;
      kl += *r.metrics.rows[i].kl_to_stationary;
    }
    CHECK(mean[i].iteration == results[0].metrics.rows[i].iteration);
    CHECK(std::abs(mean[i].exploitability - e / results.size()) <= 1e-12);
    CHECK(std::abs(*mean[i].kl_to_stationary - kl / results.size()) <= 1e-12);
  }
}

TEST_CASE("csv values round trip through the text form") {
  const fs::path d = TempDir("csv");
  ExperimentConfig cfg = Small();
  cfg.seeds = {5};
  cfg.output_dir = d.string();
  const auto results = RunExperiment(cfg);
  const auto lines = Lines(ReadFile(d / "metrics_seed5.csv"));
  REQUIRE(lines.size() == results[0].metrics.rows.size() + 1);
  std::stringstream row(lines[3]);
  std::string seed, it, ex, kl;
  std::getline(row, seed, ',');
  std::getline(row, it, ',');
  std::getline(row, ex, ',');
  std::getline(row, kl, ',');
  CHECK(seed == "5");
  CHECK(std::stoll(it) == results[0].metrics.rows[2].iteration);
  CHECK(std::stod(ex) == results[0].metrics.rows[2].exploitability);
  CHECK(std::stod(kl) == *results[0].metrics.rows[2].kl_to_stationary);
  fs::remove_all(d);
}

TEST_CASE("mu sweep") {
  const fs::path d = TempDir("sweep");
  ExperimentConfig cfg = Small();
  cfg.seeds = {0, 1};
  cfg.output_dir = d.string();
  const auto rows = SweepMu(cfg, {0.01, 0.1});
  CHECK(rows.size() == 2 * 21);
  CHECK(fs::exists(d / "sweep.csv"));
  CHECK(fs::exists(d / "mu_0.01" / "metrics_mean.csv"));
  CHECK(Lines(ReadFile(d / "sweep.csv"))[0] ==
        "mu,iteration,exploitability,kl_to_stationary");
  CHECK_THROWS_AS(SweepMu(cfg, {}), ConfigError);
  ExperimentConfig ftrl = cfg;
  ftrl.algo = "ftrl";
  CHECK_THROWS_AS(SweepMu(ftrl, {0.1}), ConfigError);
  fs::remove_all(d);
}

TEST_CASE("fixed and adaptive references on BRPS") {
  ExperimentConfig cfg;
  cfg.iterations = 100000;
  cfg.record_every = 100000;
  const double fixed = RunExperiment(cfg)[0].metrics.rows.back().exploitability;
  CHECK(fixed <= 0.03);
  cfg.refresh_period = 4000;
  const double adaptive =
      RunExperiment(cfg)[0].metrics.rows.back().exploitability;
  CHECK(adaptive < fixed);
}

TEST_CASE("format real") {
  CHECK(FormatReal(0.1) == "0.1");
  CHECK(FormatReal(1e-300) == "1e-300");
  CHECK(std::stod(FormatReal(1.0 / 3)) == 1.0 / 3);
}

}  // namespace
}  // namespace mftrl
