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

#ifndef MFTRL_LEARNER_H_
#define MFTRL_LEARNER_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mftrl/game.h"
#include "mftrl/regularizer.h"

// Discrete-time self-play learners: FTRL, mutant FTRL and optimistic FTRL,
// under full-information and bandit feedback.
//
// Scores are kept in the eta-weighted form z = eta * sum_s (utility terms),
// so the played strategy is always MirrorArgmax(reg, z).

namespace mftrl {

// Denominator floor for the mutation term when a regularizer can put exact
// zeros on actions. Softmax outputs never go below it in practice.
inline constexpr double kProbabilityFloor = 1e-9;

enum class Algorithm { kFtrl, kMFtrl, kOFtrl };
enum class Feedback { kFull, kBandit };

Algorithm ParseAlgorithm(const std::string& name);
std::string AlgorithmName(Algorithm algo);
Feedback ParseFeedback(const std::string& name);
std::string FeedbackName(Feedback feedback);

struct MutationConfig {
  double mu = 0;
  MixedStrategy reference;
  // Copy the current strategy into `reference` every N steps; empty means a
  // fixed reference.
  std::optional<std::int64_t> refresh_period;

  // mu > 0, interior reference, positive period.
  void Validate() const;
};

struct LearnerState {
  Player player = Player::kOne;
  ScoreVector scores;
  double eta = 0;
  RegularizerKind reg = RegularizerKind::kEntropy;
  Algorithm algo = Algorithm::kFtrl;
  std::optional<MutationConfig> mutation;  // set iff algo == kMFtrl
  // O-FTRL prediction: the last observed utility vector.
  std::optional<std::vector<double>> last_utility_vector;
  std::int64_t refresh_counter = 0;
  std::int64_t reference_updates = 0;

  // Initializes scores so that the learner starts at `initial`.
  static LearnerState Create(Player player, RegularizerKind reg, double eta,
                             Algorithm algo, const MixedStrategy& initial,
                             std::optional<MutationConfig> mutation = {});
};

MixedStrategy CurrentStrategy(const LearnerState& s);
// mirror_argmax(z + eta * last utility vector). Throws for non-O-FTRL states.
MixedStrategy OptimisticStrategy(const LearnerState& s);
// The strategy the learner actually plays this round: the optimistic one for
// O-FTRL, the current one otherwise.
MixedStrategy PlayedStrategy(const LearnerState& s);

// q(a) + (mu / pi(a)) (c(a) - pi(a)). With floor > 0 the denominator is
// max(pi(a), floor); with floor == 0 a zero probability throws.
std::vector<double> MutantDrift(const MutationConfig& cfg,
                                const MixedStrategy& pi,
                                std::span<const double> q,
                                double floor = kProbabilityFloor);

// One update from the exact conditional-utility vector of the current
// profile.
LearnerState FullInfoStep(LearnerState s, std::span<const double> q);

// Importance-weighted estimate of the mutant utility vector.
std::vector<double> BanditEstimateMutant(const LearnerState& s, int chosen,
                                         double realized_utility);
// u_max - ((u_max - u) / pi(chosen)) 1[a = chosen]; never exceeds u_max.
std::vector<double> BanditEstimateClipped(const MixedStrategy& pi,
                                          double u_max, int chosen,
                                          double realized_utility);

// Seeded per-player random stream.
class ActionSampler {
 public:
  ActionSampler(std::uint64_t seed, Player player);
  double Uniform01();
  std::vector<double> Uniforms(int n);

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Inverse CDF: the lowest action whose cumulative probability exceeds u.
// Zero-probability actions are never returned.
int SampleAction(const MixedStrategy& pi, double u);

// Bandit update after playing `chosen` and observing `realized_utility`.
LearnerState BanditUpdate(LearnerState s, int chosen, double realized_utility,
                          double u_max);

// Samples the learner's action, realizes the utility against
// opponent_action, and updates.
std::pair<LearnerState, int> BanditStep(LearnerState s, ActionSampler& rng,
                                        int opponent_action,
                                        const GameMatrix& g);

struct TrajectoryPoint {
  std::int64_t iteration = 0;
  StrategyProfile profile;
};

struct SelfPlayResult {
  std::vector<TrajectoryPoint> points;
  LearnerState final_1;
  LearnerState final_2;
};

// Plays T simultaneous rounds. Records the played profile at iteration 0,
// every record_every iterations, and at T. T = 0 records only the start.
SelfPlayResult RunSelfPlay(const GameMatrix& g, LearnerState s1,
                           LearnerState s2, std::int64_t iterations,
                           Feedback feedback, std::int64_t record_every,
                           std::uint64_t seed);

}  // namespace mftrl

#endif  // MFTRL_LEARNER_H_
