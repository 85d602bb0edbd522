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

#ifndef MFTRL_GAME_H_
#define MFTRL_GAME_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

// Two-player zero-sum normal-form games and the basic quantities defined on
// them: expected values, conditional utilities, best responses and
// exploitability.

namespace mftrl {

inline constexpr double kSimplexTolerance = 1e-12;

enum class Player { kOne = 1, kTwo = 2 };

inline Player Opponent(Player p) {
  return p == Player::kOne ? Player::kTwo : Player::kOne;
}
inline int PlayerIndex(Player p) { return p == Player::kOne ? 0 : 1; }

// A probability vector over one player's action set. Entries are
// nonnegative and sum to one; a vector whose sum is within
// kSimplexTolerance of one is renormalized on construction, anything else is
// rejected with std::invalid_argument.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  explicit MixedStrategy(std::vector<double> probs);

  static MixedStrategy Uniform(int n);
  static MixedStrategy Pure(int n, int action);
  // Divides nonnegative weights by their sum.
  static MixedStrategy FromWeights(std::vector<double> weights);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

  bool IsInterior() const;
  double MinProbability() const;

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> probs_;
};

struct StrategyProfile {
  MixedStrategy p1;
  MixedStrategy p2;

  const MixedStrategy& of(Player p) const {
    return p == Player::kOne ? p1 : p2;
  }
  MixedStrategy& of(Player p) { return p == Player::kOne ? p1 : p2; }
  bool IsInterior() const { return p1.IsInterior() && p2.IsInterior(); }

  friend bool operator==(const StrategyProfile&,
                         const StrategyProfile&) = default;
};

// Player-1 utilities of a zero-sum game; player 2 receives the negation.
class GameMatrix {
 public:
  GameMatrix() = default;
  // u_max defaults to the largest |entry| when negative.
  explicit GameMatrix(std::vector<std::vector<double>> u1, double u_max = -1);

  int num_actions(Player p) const {
    return p == Player::kOne ? rows_ : cols_;
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double u_max() const { return u_max_; }

  double u1(int a1, int a2) const { return data_[a1 * cols_ + a2]; }
  double Utility(Player p, int a1, int a2) const {
    return p == Player::kOne ? u1(a1, a2) : -u1(a1, a2);
  }
  std::vector<std::vector<double>> ToRows() const;

  friend bool operator==(const GameMatrix&, const GameMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double u_max_ = 0;
  std::vector<double> data_;
};

// Throws std::invalid_argument on a size mismatch between prof and g.
void CheckProfile(const GameMatrix& g, const StrategyProfile& prof);

double ExpectedValue(const GameMatrix& g, const StrategyProfile& prof,
                     Player player);

// q_player(a) = E_{opponent}[u_player(a, .)].
std::vector<double> ConditionalUtilities(const GameMatrix& g,
                                         const MixedStrategy& opponent,
                                         Player player);

// Pure best response; ties go to the lowest action index.
int BestResponse(const GameMatrix& g, const MixedStrategy& opponent,
                 Player player);

double Exploitability(const GameMatrix& g, const StrategyProfile& prof);

bool IsEpsNash(const GameMatrix& g, const StrategyProfile& prof, double eps);

GameMatrix MakeBiasedRps();
GameMatrix MakeMultipleEquilibria();
// Entries i.i.d. uniform on [0, 1]; u_max = 1.
GameMatrix MakeRandomGame(int n1, int n2, std::uint64_t seed);

// Flat Dirichlet draw through normalized exponentials.
MixedStrategy SampleInteriorStrategy(int n, std::mt19937_64& rng);
MixedStrategy SampleInteriorStrategy(int n, std::uint64_t seed);

// Built-in names "brps", "meq", "random" (optionally "random:N1xN2"), or a
// path to a JSON file {"u1": [[...]], "u_max": <real>}. Random games use
// `seed`.
GameMatrix LoadGame(const std::string& name_or_path, std::uint64_t seed = 0);
GameMatrix ParseGameJson(const std::string& text);
bool IsBuiltinRandomGame(const std::string& name);

}  // namespace mftrl

#endif  // MFTRL_GAME_H_
