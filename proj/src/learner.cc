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

#include "mftrl/learner.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mftrl {
namespace {

void CheckDimension(const LearnerState& s, std::size_t n) {
  if (static_cast<int>(n) != s.scores.size()) {
    throw std::invalid_argument("utility vector has the wrong dimension for "
                                "this learner");
  }
}

// Every N steps the reference becomes the strategy that was just played.
void AdvanceReference(LearnerState& s, const MixedStrategy& played) {
  if (s.algo != Algorithm::kMFtrl || !s.mutation->refresh_period) return;
  if (++s.refresh_counter < *s.mutation->refresh_period) return;
  s.refresh_counter = 0;
  ++s.reference_updates;
  if (played.IsInterior()) {
    s.mutation->reference = played;
    return;
  }
  std::vector<double> w(played.probs().begin(), played.probs().end());
  for (double& x : w) x = std::max(x, kProbabilityFloor);
  s.mutation->reference = MixedStrategy::FromWeights(std::move(w));
}

}  // namespace

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "ftrl") return Algorithm::kFtrl;
  if (name == "mftrl") return Algorithm::kMFtrl;
  if (name == "oftrl") return Algorithm::kOFtrl;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected ftrl|mftrl|oftrl)");
}

std::string AlgorithmName(Algorithm algo) {
  switch (algo) {
    case Algorithm::kFtrl:
      return "ftrl";
    case Algorithm::kMFtrl:
      return "mftrl";
    case Algorithm::kOFtrl:
      return "oftrl";
  }
  return "?";
}

Feedback ParseFeedback(const std::string& name) {
  if (name == "full") return Feedback::kFull;
  if (name == "bandit") return Feedback::kBandit;
  throw std::invalid_argument("unknown feedback '" + name +
                              "' (expected full|bandit)");
}

std::string FeedbackName(Feedback feedback) {
  return feedback == Feedback::kFull ? "full" : "bandit";
}

void MutationConfig::Validate() const {
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mutation parameter mu must be positive");
  }
  if (reference.size() == 0 || !reference.IsInterior()) {
    throw std::invalid_argument("reference strategy must be interior");
  }
  if (refresh_period && *refresh_period <= 0) {
    throw std::invalid_argument("refresh period must be positive");
  }
}

LearnerState LearnerState::Create(Player player, RegularizerKind reg,
                                  double eta, Algorithm algo,
                                  const MixedStrategy& initial,
                                  std::optional<MutationConfig> mutation) {
  if (!(eta > 0) || !std::isfinite(eta)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if ((algo == Algorithm::kMFtrl) != mutation.has_value()) {
    throw std::invalid_argument("a mutation config is required for mftrl and "
                                "only for mftrl");
  }
  if (mutation) {
    mutation->Validate();
    if (mutation->reference.size() != initial.size()) {
      throw std::invalid_argument("reference strategy has the wrong size");
    }
  }
  LearnerState s;
  s.player = player;
  s.scores = ScoreVector(InvertMirrorArgmax(reg, initial));
  s.eta = eta;
  s.reg = reg;
  s.algo = algo;
  s.mutation = std::move(mutation);
  return s;
}

MixedStrategy CurrentStrategy(const LearnerState& s) {
  return MirrorArgmax(s.reg, s.scores);
}

MixedStrategy OptimisticStrategy(const LearnerState& s) {
  if (s.algo != Algorithm::kOFtrl) {
    throw std::logic_error("optimistic strategy requested from a non-O-FTRL "
                           "learner");
  }
  if (!s.last_utility_vector) return CurrentStrategy(s);
  std::vector<double> z(s.scores.values().begin(), s.scores.values().end());
  for (std::size_t a = 0; a < z.size(); ++a) {
    z[a] += s.eta * (*s.last_utility_vector)[a];
  }
  return MirrorArgmax(s.reg, z);
}

MixedStrategy PlayedStrategy(const LearnerState& s) {
  return s.algo == Algorithm::kOFtrl ? OptimisticStrategy(s)
                                     : CurrentStrategy(s);
}

std::vector<double> MutantDrift(const MutationConfig& cfg,
                                const MixedStrategy& pi,
                                std::span<const double> q, double floor) {
  if (static_cast<int>(q.size()) != pi.size() ||
      cfg.reference.size() != pi.size()) {
    throw std::invalid_argument("mutant drift dimension mismatch");
  }
  std::vector<double> out(q.begin(), q.end());
  for (int a = 0; a < pi.size(); ++a) {
    double denom = pi[a];
    if (denom < floor) denom = floor;
    if (!(denom > 0)) {
      throw std::domain_error("mutation term hit a zero probability");
    }
    out[a] += cfg.mu / denom * (cfg.reference[a] - pi[a]);
  }
  return out;
}

LearnerState FullInfoStep(LearnerState s, std::span<const double> q) {
  CheckDimension(s, q.size());
  const MixedStrategy pi = CurrentStrategy(s);
  switch (s.algo) {
    case Algorithm::kFtrl:
      s.scores.AddScaled(q, s.eta);
      break;
    case Algorithm::kMFtrl:
      s.scores.AddScaled(MutantDrift(*s.mutation, pi, q), s.eta);
      break;
    case Algorithm::kOFtrl:
      s.scores.AddScaled(q, s.eta);
      s.last_utility_vector.emplace(q.begin(), q.end());
      break;
  }
  AdvanceReference(s, pi);
  return s;
}

std::vector<double> BanditEstimateMutant(const LearnerState& s, int chosen,
                                         double realized_utility) {
  if (s.algo != Algorithm::kMFtrl) {
    throw std::logic_error("mutant estimator needs an M-FTRL learner");
  }
  const MixedStrategy pi = CurrentStrategy(s);
  if (chosen < 0 || chosen >= pi.size()) {
    throw std::invalid_argument("chosen action out of range");
  }
  if (!(pi[chosen] > 0)) {
    throw std::domain_error("chosen action has zero probability");
  }
  std::vector<double> weighted(pi.size(), 0.0);
  weighted[chosen] = realized_utility / pi[chosen];
  return MutantDrift(*s.mutation, pi, weighted);
}

std::vector<double> BanditEstimateClipped(const MixedStrategy& pi,
                                          double u_max, int chosen,
                                          double realized_utility) {
  if (chosen < 0 || chosen >= pi.size()) {
    throw std::invalid_argument("chosen action out of range");
  }
  if (!(pi[chosen] > 0)) {
    throw std::domain_error("chosen action has zero probability");
  }
  std::vector<double> out(pi.size(), u_max);
  out[chosen] = u_max - (u_max - realized_utility) / pi[chosen];
  return out;
}

ActionSampler::ActionSampler(std::uint64_t seed, Player player) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(PlayerIndex(player) + 1)};
  engine_.seed(seq);
}

double ActionSampler::Uniform01() { return unif_(engine_); }

std::vector<double> ActionSampler::Uniforms(int n) {
  std::vector<double> out(n);
  for (double& u : out) u = Uniform01();
  return out;
}

int SampleAction(const MixedStrategy& pi, double u) {
  double cumulative = 0;
  int last_positive = -1;
  for (int a = 0; a < pi.size(); ++a) {
    if (pi[a] <= 0) continue;
    last_positive = a;
    cumulative += pi[a];
    if (u < cumulative) return a;
  }
  return last_positive;
}

LearnerState BanditUpdate(LearnerState s, int chosen, double realized_utility,
                          double u_max) {
  const MixedStrategy pi = PlayedStrategy(s);
  std::vector<double> estimate =
      s.algo == Algorithm::kMFtrl
          ? BanditEstimateMutant(s, chosen, realized_utility)
          : BanditEstimateClipped(pi, u_max, chosen, realized_utility);
  s.scores.AddScaled(estimate, s.eta);
  if (s.algo == Algorithm::kOFtrl) s.last_utility_vector = std::move(estimate);
  AdvanceReference(s, pi);
  return s;
}

std::pair<LearnerState, int> BanditStep(LearnerState s, ActionSampler& rng,
                                        int opponent_action,
                                        const GameMatrix& g) {
  const int own = SampleAction(PlayedStrategy(s), rng.Uniform01());
  const int a1 = s.player == Player::kOne ? own : opponent_action;
  const int a2 = s.player == Player::kOne ? opponent_action : own;
  if (a1 < 0 || a1 >= g.rows() || a2 < 0 || a2 >= g.cols()) {
    throw std::invalid_argument("action out of range for this game");
  }
  const double u = g.Utility(s.player, a1, a2);
  return {BanditUpdate(std::move(s), own, u, g.u_max()), own};
}

SelfPlayResult RunSelfPlay(const GameMatrix& g, LearnerState s1,
                           LearnerState s2, std::int64_t iterations,
                           Feedback feedback, std::int64_t record_every,
                           std::uint64_t seed) {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (record_every <= 0) throw std::invalid_argument("record_every must be > 0");
  if (s1.player != Player::kOne || s2.player != Player::kTwo) {
    throw std::invalid_argument("self-play needs learners for players 1, 2");
  }
  if (s1.scores.size() != g.rows() || s2.scores.size() != g.cols()) {
    throw std::invalid_argument("learner sizes do not match the game");
  }
  for (const LearnerState* s : {&s1, &s2}) {
    if (iterations > 0 && s->mutation && s->mutation->refresh_period &&
        *s->mutation->refresh_period > iterations) {
      throw std::invalid_argument("refresh period exceeds the horizon");
    }
  }

  SelfPlayResult result;
  ActionSampler rng1(seed, Player::kOne);
  ActionSampler rng2(seed, Player::kTwo);
  StrategyProfile played{PlayedStrategy(s1), PlayedStrategy(s2)};
  result.points.push_back({0, played});
  for (std::int64_t t = 1; t <= iterations; ++t) {
    if (feedback == Feedback::kFull) {
      const auto q1 = ConditionalUtilities(g, played.p2, Player::kOne);
      const auto q2 = ConditionalUtilities(g, played.p1, Player::kTwo);
      s1 = FullInfoStep(std::move(s1), q1);
      s2 = FullInfoStep(std::move(s2), q2);
    } else {
      const int a1 = SampleAction(played.p1, rng1.Uniform01());
      const int a2 = SampleAction(played.p2, rng2.Uniform01());
      const double u = g.u1(a1, a2);
      s1 = BanditUpdate(std::move(s1), a1, u, g.u_max());
      s2 = BanditUpdate(std::move(s2), a2, -u, g.u_max());
    }
    played = {PlayedStrategy(s1), PlayedStrategy(s2)};
    if (t % record_every == 0 || t == iterations) {
      result.points.push_back({t, played});
    }
  }
  result.final_1 = std::move(s1);
  result.final_2 = std::move(s2);
  return result;
}

}  // namespace mftrl
