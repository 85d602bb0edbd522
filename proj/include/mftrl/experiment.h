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

#ifndef MFTRL_EXPERIMENT_H_
#define MFTRL_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mftrl/game.h"
#include "mftrl/learner.h"

namespace mftrl {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string game = "brps";  // built-in name or JSON file path
  std::string algo = "mftrl";
  std::string regularizer = "entropy";
  std::string feedback = "full";
  double eta = 0.1;
  double mu = 0.01;  // ignored unless algo == "mftrl"
  // "uniform", or comma-separated probabilities; "p1;p2" gives one vector
  // per player, a single vector is applied to both.
  std::string reference = "uniform";
  std::optional<std::int64_t> refresh_period;
  std::int64_t iterations = 100000;
  std::int64_t record_every = 100;
  std::vector<std::int64_t> seeds = {0};
  // "random" samples a flat-Dirichlet interior start per seed; "uniform"
  // starts every seed at the uniform profile.
  std::string initial = "random";
  std::string output_dir;  // empty: nothing written
  int workers = 0;         // 0: hardware concurrency

  // Throws ConfigError.
  void Validate() const;

  std::string ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig FromJson(const std::string& text);
  static ExperimentConfig FromFile(const std::string& path);
  // 16 hex digits of FNV-1a over ToJson().
  std::string Hash() const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Default record_every when not given: 100 under full information, 1000
// under bandit feedback.
std::int64_t DefaultRecordEvery(const std::string& feedback);

// "0..99" or "1,2,5" or "3".
std::vector<std::int64_t> ParseSeeds(const std::string& text);
std::vector<double> ParseRealList(const std::string& text);

// Per-player mutation references for `g` from a config reference string.
// Throws ConfigError.
std::pair<MixedStrategy, MixedStrategy> ResolveReference(
    const std::string& reference, const GameMatrix& g);

struct TrajectoryRecord {
  std::string config_hash;
  std::vector<TrajectoryPoint> points;
};

struct MetricRow {
  std::int64_t iteration = 0;
  double exploitability = 0;
  std::optional<double> kl_to_stationary;
};

struct MetricRecord {
  std::vector<MetricRow> rows;
};

struct SeedResult {
  std::int64_t seed = 0;
  TrajectoryRecord trajectory;
  MetricRecord metrics;
};

struct AggregateRow {
  std::int64_t iteration = 0;
  double exploitability = 0;
  std::optional<double> kl_to_stationary;
};

// Means over seeds per recorded iteration, ordered by iteration.
std::vector<AggregateRow> Aggregate(const std::vector<SeedResult>& results);

// One self-play run per seed (parallel across seeds, deterministic per
// seed). When cfg.output_dir is set writes metrics_seed<k>.csv,
// trajectory_seed<k>.csv, metrics_mean.csv and config.json there.
std::vector<SeedResult> RunExperiment(const ExperimentConfig& cfg);

struct SweepRow {
  double mu = 0;
  AggregateRow row;
};

// One batch per mu; writes sweep.csv (and per-mu subdirectories) under
// base.output_dir when set.
std::vector<SweepRow> SweepMu(const ExperimentConfig& base,
                              const std::vector<double>& mus);

// CSV writers; headers are always present.
void EmitMetricsCsv(const std::vector<SeedResult>& results,
                    const std::string& path);
void EmitTrajectoryCsv(const std::vector<SeedResult>& results,
                       const std::string& path);
void EmitAggregateCsv(const std::vector<AggregateRow>& rows,
                      const std::string& path);
void EmitSweepCsv(const std::vector<SweepRow>& rows, const std::string& path);

inline constexpr const char* kMetricsHeader =
    "seed,iteration,exploitability,kl_to_stationary";
inline constexpr const char* kTrajectoryHeader =
    "seed,iteration,player,action,probability";
inline constexpr const char* kAggregateHeader =
    "iteration,exploitability,kl_to_stationary";
inline constexpr const char* kSweepHeader =
    "mu,iteration,exploitability,kl_to_stationary";

// Shortest round-trip decimal form.
std::string FormatReal(double x);

}  // namespace mftrl

#endif  // MFTRL_EXPERIMENT_H_
