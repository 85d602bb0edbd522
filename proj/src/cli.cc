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


#include "mftrl/cli.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mftrl/certificates.h"
#include "mftrl/dynamics.h"
#include "mftrl/experiment.h"
#include "mftrl/game.h"

namespace mftrl {
namespace {

// Flag values; each only overrides the config when given.
struct RunFlags {
  std::string config_path;
  std::string game, algo, regularizer, feedback, reference, seeds, initial, out;
  double eta = 0, mu = 0;
  std::int64_t refresh_period = 0, iters = 0, record_every = 0;
  int workers = 0;
  CLI::Option* game_opt = nullptr;
  CLI::Option* algo_opt = nullptr;
  CLI::Option* regularizer_opt = nullptr;
  CLI::Option* feedback_opt = nullptr;
  CLI::Option* reference_opt = nullptr;
  CLI::Option* seeds_opt = nullptr;
  CLI::Option* initial_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* eta_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* refresh_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* record_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  f.game_opt = cmd->add_option("--game", f.game,
                               "brps | meq | random | random:N1xN2 | file");
  f.algo_opt = cmd->add_option("--algo", f.algo, "ftrl | mftrl | oftrl");
  f.regularizer_opt =
      cmd->add_option("--regularizer", f.regularizer, "entropy | euclidean");
  f.feedback_opt = cmd->add_option("--feedback", f.feedback, "full | bandit");
  f.eta_opt = cmd->add_option("--eta", f.eta, "learning rate");
  f.mu_opt = cmd->add_option("--mu", f.mu, "mutation rate");
  f.reference_opt = cmd->add_option("--reference", f.reference,
                                    "uniform | p,... | p,...;q,...");
  f.refresh_opt = cmd->add_option("--refresh-period", f.refresh_period,
                                  "reference refresh period N");
  f.iters_opt = cmd->add_option("--iters", f.iters, "iterations T");
  f.record_opt =
      cmd->add_option("--record-every", f.record_every, "recording stride");
  f.seeds_opt = cmd->add_option("--seeds", f.seeds, "0..99 | 1,2,3");
  f.initial_opt = cmd->add_option("--initial", f.initial, "random | uniform");
  f.out_opt = cmd->add_option("--out", f.out, "output directory");
  f.workers_opt = cmd->add_option("--workers", f.workers, "worker threads");
}

ExperimentConfig BuildConfig(const RunFlags& f) {
  ExperimentConfig cfg;
  bool has_iters = false, has_record_every = false;
  if (!f.config_path.empty()) {
    cfg = ExperimentConfig::FromFile(f.config_path);
    std::ifstream in(f.config_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    has_iters = j.contains("iterations");
    has_record_every = j.contains("record_every");
  }
  if (*f.game_opt) cfg.game = f.game;
  if (*f.algo_opt) cfg.algo = f.algo;
  if (*f.regularizer_opt) cfg.regularizer = f.regularizer;
  if (*f.feedback_opt) cfg.feedback = f.feedback;
  if (*f.eta_opt) cfg.eta = f.eta;
  if (*f.mu_opt) cfg.mu = f.mu;
  if (*f.reference_opt) cfg.reference = f.reference;
  if (*f.refresh_opt) cfg.refresh_period = f.refresh_period;
  if (*f.iters_opt) {
    cfg.iterations = f.iters;
    has_iters = true;
  }
  if (*f.record_opt) {
    cfg.record_every = f.record_every;
    has_record_every = true;
  }
  if (*f.seeds_opt) cfg.seeds = ParseSeeds(f.seeds);
  if (*f.initial_opt) cfg.initial = f.initial;
  if (*f.out_opt) cfg.output_dir = f.out;
  if (*f.workers_opt) cfg.workers = f.workers;
  if (!has_iters) cfg.iterations = cfg.feedback == "bandit" ? 2'000'000 : 100'000;
  if (!has_record_every) {
    cfg.record_every =
        std::min(DefaultRecordEvery(cfg.feedback), cfg.iterations);
  }
  cfg.Validate();
  return cfg;
}

void PrintStrategy(std::ostream& out, const std::string& label,
                   const MixedStrategy& s) {
  out << label << ":";
  for (int a = 0; a < s.size(); ++a) out << (a ? "," : " ") << FormatReal(s[a]);
  out << "\n";
}

int RunSimulate(const RunFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = BuildConfig(f);
  const std::vector<SeedResult> results = RunExperiment(cfg);
  const std::vector<AggregateRow> mean = Aggregate(results);
  out << "config " << cfg.Hash() << ": " << results.size() << " seeds, "
      << cfg.iterations << " iterations\n";
  if (!mean.empty()) {
    out << "final mean exploitability: "
        << FormatReal(mean.back().exploitability) << "\n";
  }
  if (!cfg.output_dir.empty()) out << "wrote " << cfg.output_dir << "\n";
  return kExitOk;
}

int RunSweep(const RunFlags& f, const std::string& mu_list,
             std::ostream& out) {
  const ExperimentConfig cfg = BuildConfig(f);
  const std::vector<double> mus = ParseRealList(mu_list);
  const std::vector<SweepRow> rows = SweepMu(cfg, mus);
  for (double mu : mus) {
    const SweepRow* last = nullptr;
    for (const SweepRow& r : rows) {
      if (r.mu == mu) last = &r;
    }
    if (last != nullptr) {
      out << "mu " << FormatReal(mu) << ": final mean exploitability "
          << FormatReal(last->row.exploitability) << "\n";
    }
  }
  return kExitOk;
}

int RunStationary(const std::string& game, double mu,
                  const std::string& reference, double tol,
                  std::uint64_t seed, std::ostream& out) {
  if (!(mu > 0)) throw ConfigError("--mu must be positive");
  if (!(tol > 0)) throw ConfigError("--tol must be positive");
  GameMatrix g = [&] {
    try {
      return LoadGame(game, seed);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }();
  auto [c1, c2] = ResolveReference(reference, g);
  RmdParams p{std::move(g), mu, std::move(c1), std::move(c2)};
  const StationaryPoint sp = SolveStationary(p, tol);
  PrintStrategy(out, "player 1", sp.profile.p1);
  PrintStrategy(out, "player 2", sp.profile.p2);
  out << "residual: " << FormatReal(sp.residual) << "\n";
  out << "xi: " << FormatReal(sp.xi) << "\n";
  out << "exploitability: " << FormatReal(Exploitability(p.game, sp.profile))
      << "\n";
  return kExitOk;
}

int RunVerify(const std::string& suite, const std::string& summary_path,
              std::ostream& out) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = CertificateNames();
  } else {
    const auto& known = CertificateNames();
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
      throw ConfigError("unknown suite '" + suite + "'");
    }
    names = {suite};
  }
  std::vector<CertificateResult> results;
  for (const std::string& name : names) {
    results.push_back(RunCertificate(name));
    const CertificateResult& r = results.back();
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
        << "\n";
  }
  bool all_pass = true;
  std::ofstream summary;
  if (!summary_path.empty()) {
    summary.open(summary_path);
    if (!summary) throw std::runtime_error("cannot write " + summary_path);
  }
  for (const CertificateResult& r : results) {
    out << SummaryLine(r) << "\n";
    if (summary.is_open()) summary << SummaryLine(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitCertificateFailure;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Mutant FTRL self-play and replicator-mutator certificates",
               "mftrl"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "run one config");
  AddRunFlags(simulate, sim_flags);

  RunFlags sweep_flags;
  std::string mu_list;
  CLI::App* sweep = app.add_subcommand("sweep", "run one batch per mu");
  AddRunFlags(sweep, sweep_flags);
  sweep->add_option("--mu-list", mu_list, "comma-separated mu values")
      ->required();

  std::string st_game = "brps", st_reference = "uniform";
  double st_mu = 0.1, st_tol = 1e-10;
  std::uint64_t st_seed = 0;
  CLI::App* stationary =
      app.add_subcommand("stationary", "solve for the RMD rest point");
  stationary->add_option("--game", st_game, "game name or file");
  stationary->add_option("--mu", st_mu, "mutation rate");
  stationary->add_option("--reference", st_reference, "reference strategy");
  stationary->add_option("--tol", st_tol, "residual tolerance");
  stationary->add_option("--seed", st_seed, "seed for random games");

  std::string suite = "all", summary_path;
  CLI::App* verify = app.add_subcommand("verify", "run numerical certificates");
  verify->add_option("--suite", suite, "certificate name or 'all'");
  verify->add_option("--summary", summary_path,
                     "write name,pass|fail,observed,threshold lines here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitConfigError;
  }

  try {
    if (*simulate) return RunSimulate(sim_flags, out);
    if (*sweep) return RunSweep(sweep_flags, mu_list, out);
    if (*stationary) {
      return RunStationary(st_game, st_mu, st_reference, st_tol, st_seed, out);
    }
    return RunVerify(suite, summary_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int CliMain(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return CliMain(args, std::cout, std::cerr);
}

}  // namespace mftrl
