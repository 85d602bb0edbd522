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

#include "mftrl/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mftrl/dynamics.h"
#include "mftrl/regularizer.h"

namespace mftrl {
namespace {

using nlohmann::json;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(Trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double ParseReal(const std::string& s) {
  double v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

std::int64_t ParseInt(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  return v;
}

// Reference vectors per player (empty => uniform).
std::pair<std::vector<double>, std::vector<double>> ParseReference(
    const std::string& text) {
  if (text == "uniform") return {};
  const auto parts = Split(text, ';');
  if (parts.empty() || parts.size() > 2) {
    throw ConfigError("reference must be 'uniform', 'p,...' or 'p,...;q,...'");
  }
  auto first = ParseRealList(parts[0]);
  auto second = parts.size() == 2 ? ParseRealList(parts[1]) : first;
  return {std::move(first), std::move(second)};
}

MixedStrategy ReferenceFor(const std::vector<double>& probs, int n) {
  if (probs.empty()) return MixedStrategy::Uniform(n);
  if (static_cast<int>(probs.size()) != n) {
    throw ConfigError("reference has " + std::to_string(probs.size()) +
                      " entries but the player has " + std::to_string(n) +
                      " actions");
  }
  MixedStrategy c(probs);
  if (!c.IsInterior()) throw ConfigError("reference must be interior");
  return c;
}

StrategyProfile InitialProfile(const ExperimentConfig& cfg,
                               const GameMatrix& g, std::int64_t seed) {
  if (cfg.initial == "uniform") {
    return {MixedStrategy::Uniform(g.rows()), MixedStrategy::Uniform(g.cols())};
  }
  const auto s = static_cast<std::uint64_t>(seed);
  std::seed_seq seq{static_cast<std::uint32_t>(s & 0xffffffffu),
                    static_cast<std::uint32_t>(s >> 32), 0x1417u};
  std::mt19937_64 rng(seq);
  MixedStrategy p1 = SampleInteriorStrategy(g.rows(), rng);
  MixedStrategy p2 = SampleInteriorStrategy(g.cols(), rng);
  return {std::move(p1), std::move(p2)};
}

SeedResult RunOneSeed(const ExperimentConfig& cfg, std::int64_t seed) {
  const GameMatrix g = LoadGame(cfg.game, static_cast<std::uint64_t>(seed));
  const Algorithm algo = ParseAlgorithm(cfg.algo);
  const RegularizerKind reg = ParseRegularizer(cfg.regularizer);
  const Feedback feedback = ParseFeedback(cfg.feedback);
  const StrategyProfile start = InitialProfile(cfg, g, seed);

  std::optional<MutationConfig> m1, m2;
  std::optional<StationaryPoint> stationary;
  if (algo == Algorithm::kMFtrl) {
    const auto [r1, r2] = ParseReference(cfg.reference);
    m1 = MutationConfig{cfg.mu, ReferenceFor(r1, g.rows()), cfg.refresh_period};
    m2 = MutationConfig{cfg.mu, ReferenceFor(r2, g.cols()), cfg.refresh_period};
    if (!cfg.refresh_period) {
      RmdParams params{g, cfg.mu, m1->reference, m2->reference};
      stationary = SolveStationary(params, 1e-12);
    }
  }
  LearnerState s1 = LearnerState::Create(Player::kOne, reg, cfg.eta, algo,
                                         start.p1, m1);
  LearnerState s2 = LearnerState::Create(Player::kTwo, reg, cfg.eta, algo,
                                         start.p2, m2);
  SelfPlayResult run =
      RunSelfPlay(g, std::move(s1), std::move(s2), cfg.iterations, feedback,
                  cfg.record_every, static_cast<std::uint64_t>(seed));

  SeedResult out;
  out.seed = seed;
  out.trajectory.config_hash = cfg.Hash();
  for (const TrajectoryPoint& pt : run.points) {
    MetricRow row;
    row.iteration = pt.iteration;
    row.exploitability = Exploitability(g, pt.profile);
    if (stationary && pt.profile.IsInterior()) {
      row.kl_to_stationary = ProfileKl(stationary->profile, pt.profile);
    }
    out.metrics.rows.push_back(row);
  }
  out.trajectory.points = std::move(run.points);
  return out;
}

std::ofstream OpenForWrite(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void Close(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string OptionalReal(const std::optional<double>& x) {
  return x ? FormatReal(*x) : "";
}

void WriteExperimentFiles(const ExperimentConfig& cfg,
                          const std::vector<SeedResult>& results) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  for (const SeedResult& r : results) {
    const std::string k = std::to_string(r.seed);
    EmitMetricsCsv({r}, (dir / ("metrics_seed" + k + ".csv")).string());
    EmitTrajectoryCsv({r}, (dir / ("trajectory_seed" + k + ".csv")).string());
  }
  EmitAggregateCsv(Aggregate(results), (dir / "metrics_mean.csv").string());
  const std::string cfg_path = (dir / "config.json").string();
  std::ofstream out = OpenForWrite(cfg_path);
  out << cfg.ToJson() << "\n";
  Close(out, cfg_path);
}

}  // namespace

std::string FormatReal(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<std::int64_t> ParseSeeds(const std::string& text) {
  std::vector<std::int64_t> seeds;
  for (const std::string& part : Split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(ParseInt(part));
      continue;
    }
    const std::int64_t lo = ParseInt(Trim(part.substr(0, dots)));
    const std::int64_t hi = ParseInt(Trim(part.substr(dots + 2)));
    if (hi < lo) throw ConfigError("empty seed range '" + part + "'");
    for (std::int64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

std::vector<double> ParseRealList(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : Split(text, ',')) out.push_back(ParseReal(part));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::pair<MixedStrategy, MixedStrategy> ResolveReference(
    const std::string& reference, const GameMatrix& g) {
  const auto [r1, r2] = ParseReference(reference);
  return {ReferenceFor(r1, g.rows()), ReferenceFor(r2, g.cols())};
}

std::int64_t DefaultRecordEvery(const std::string& feedback) {
  return feedback == "bandit" ? 1000 : 100;
}

void ExperimentConfig::Validate() const {
  try {
    ParseAlgorithm(algo);
    ParseRegularizer(regularizer);
    ParseFeedback(feedback);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (game.empty()) throw ConfigError("game must be given");
  if (!(eta > 0)) throw ConfigError("eta must be positive");
  if (!(mu >= 0)) throw ConfigError("mu must be nonnegative");
  if (iterations <= 0) throw ConfigError("iterations must be positive");
  if (record_every <= 0 || record_every > iterations) {
    throw ConfigError("record_every must be in [1, iterations]");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (initial != "random" && initial != "uniform") {
    throw ConfigError("initial must be 'random' or 'uniform'");
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (refresh_period &&
      (*refresh_period <= 0 || *refresh_period > iterations)) {
    throw ConfigError("refresh_period must be in [1, iterations]");
  }
  if (algo == "mftrl") {
    if (!(mu > 0)) throw ConfigError("mftrl needs mu > 0");
    const auto [r1, r2] = ParseReference(reference);
    for (const auto* r : {&r1, &r2}) {
      if (r->empty()) continue;
      try {
        if (!MixedStrategy(*r).IsInterior()) {
          throw ConfigError("reference must be interior");
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad reference: ") + e.what());
      }
    }
  } else if (reference != "uniform") {
    ParseReference(reference);
  }
}

std::string ExperimentConfig::ToJson() const {
  json j;
  j["game"] = game;
  j["algo"] = algo;
  j["regularizer"] = regularizer;
  j["feedback"] = feedback;
  j["eta"] = eta;
  j["mu"] = mu;
  j["reference"] = reference;
  j["refresh_period"] =
      refresh_period ? json(*refresh_period) : json(nullptr);
  j["iterations"] = iterations;
  j["record_every"] = record_every;
  j["seeds"] = seeds;
  j["initial"] = initial;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "game") {
        cfg.game = value.get<std::string>();
      } else if (key == "algo") {
        cfg.algo = value.get<std::string>();
      } else if (key == "regularizer") {
        cfg.regularizer = value.get<std::string>();
      } else if (key == "feedback") {
        cfg.feedback = value.get<std::string>();
      } else if (key == "eta") {
        cfg.eta = value.get<double>();
      } else if (key == "mu") {
        cfg.mu = value.get<double>();
      } else if (key == "reference") {
        if (value.is_array()) {
          std::string joined;
          for (const auto& x : value) {
            if (!joined.empty()) joined += ",";
            joined += FormatReal(x.get<double>());
          }
          cfg.reference = joined;
        } else {
          cfg.reference = value.get<std::string>();
        }
      } else if (key == "refresh_period") {
        if (value.is_null()) {
          cfg.refresh_period.reset();
        } else {
          cfg.refresh_period = value.get<std::int64_t>();
        }
      } else if (key == "iterations") {
        cfg.iterations = value.get<std::int64_t>();
      } else if (key == "record_every") {
        cfg.record_every = value.get<std::int64_t>();
      } else if (key == "seeds") {
        if (value.is_string()) {
          cfg.seeds = ParseSeeds(value.get<std::string>());
        } else {
          cfg.seeds = value.get<std::vector<std::int64_t>>();
        }
      } else if (key == "initial") {
        cfg.initial = value.get<std::string>();
      } else if (key == "output_dir") {
        cfg.output_dir = value.get<std::string>();
      } else if (key == "workers") {
        cfg.workers = value.get<int>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") +
                      e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str());
}

std::string ExperimentConfig::Hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : ToJson()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<AggregateRow> Aggregate(const std::vector<SeedResult>& results) {
  struct Acc {
    double exploit = 0, kl = 0;
    int n = 0, n_kl = 0;
  };
  std::map<std::int64_t, Acc> acc;
  for (const SeedResult& r : results) {
    for (const MetricRow& row : r.metrics.rows) {
      Acc& a = acc[row.iteration];
      a.exploit += row.exploitability;
      ++a.n;
      if (row.kl_to_stationary) {
        a.kl += *row.kl_to_stationary;
        ++a.n_kl;
      }
    }
  }
  std::vector<AggregateRow> out;
  for (const auto& [it, a] : acc) {
    AggregateRow row;
    row.iteration = it;
    row.exploitability = a.exploit / a.n;
    // KL mean only when every seed reported it at this iteration.
    if (a.n_kl == a.n) row.kl_to_stationary = a.kl / a.n_kl;
    out.push_back(row);
  }
  return out;
}

std::vector<SeedResult> RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const std::size_t n = cfg.seeds.size();
  std::vector<SeedResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                        : std::max(1u, hw);
  workers = std::min(workers, n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = RunOneSeed(cfg, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::sort(results.begin(), results.end(),
            [](const SeedResult& a, const SeedResult& b) {
              return a.seed < b.seed;
            });
  if (!cfg.output_dir.empty()) WriteExperimentFiles(cfg, results);
  return results;
}

std::vector<SweepRow> SweepMu(const ExperimentConfig& base,
                              const std::vector<double>& mus) {
  if (mus.empty()) throw ConfigError("mu sweep needs at least one value");
  if (base.algo != "mftrl") throw ConfigError("mu sweep needs algo mftrl");
  std::vector<SweepRow> rows;
  for (double mu : mus) {
    if (!(mu > 0)) throw ConfigError("sweep values of mu must be positive");
    ExperimentConfig cfg = base;
    cfg.mu = mu;
    if (!base.output_dir.empty()) {
      cfg.output_dir =
          (std::filesystem::path(base.output_dir) / ("mu_" + FormatReal(mu)))
              .string();
    }
    for (const AggregateRow& row : Aggregate(RunExperiment(cfg))) {
      rows.push_back({mu, row});
    }
  }
  if (!base.output_dir.empty()) {
    EmitSweepCsv(rows,
                 (std::filesystem::path(base.output_dir) / "sweep.csv").string());
  }
  return rows;
}

void EmitMetricsCsv(const std::vector<SeedResult>& results,
                    const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kMetricsHeader << "\n";
  for (const SeedResult& r : results) {
    for (const MetricRow& row : r.metrics.rows) {
      out << r.seed << ',' << row.iteration << ','
          << FormatReal(row.exploitability) << ','
          << OptionalReal(row.kl_to_stationary) << "\n";
    }
  }
  Close(out, path);
}

void EmitTrajectoryCsv(const std::vector<SeedResult>& results,
                       const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kTrajectoryHeader << "\n";
  for (const SeedResult& r : results) {
    for (const TrajectoryPoint& pt : r.trajectory.points) {
      for (Player pl : {Player::kOne, Player::kTwo}) {
        const MixedStrategy& pi = pt.profile.of(pl);
        for (int a = 0; a < pi.size(); ++a) {
          out << r.seed << ',' << pt.iteration << ',' << PlayerIndex(pl) + 1
              << ',' << a << ',' << FormatReal(pi[a]) << "\n";
        }
      }
    }
  }
  Close(out, path);
}

void EmitAggregateCsv(const std::vector<AggregateRow>& rows,
                      const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kAggregateHeader << "\n";
  for (const AggregateRow& row : rows) {
    out << row.iteration << ',' << FormatReal(row.exploitability) << ','
        << OptionalReal(row.kl_to_stationary) << "\n";
  }
  Close(out, path);
}

void EmitSweepCsv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kSweepHeader << "\n";
  for (const SweepRow& r : rows) {
    out << FormatReal(r.mu) << ',' << r.row.iteration << ','
        << FormatReal(r.row.exploitability) << ','
        << OptionalReal(r.row.kl_to_stationary) << "\n";
  }
  Close(out, path);
}

}  // namespace mftrl
