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

#include "mftrl/game.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mftrl {

MixedStrategy::MixedStrategy(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("mixed strategy over an empty action set");
  }
  double sum = 0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0) {
      throw std::invalid_argument("mixed strategy entry is negative or "
                                  "non-finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mixed strategy sums to " << sum << ", not 1";
    throw std::invalid_argument(msg.str());
  }
  for (double& p : probs_) p /= sum;
}

MixedStrategy MixedStrategy::Uniform(int n) {
  if (n <= 0) throw std::invalid_argument("uniform strategy needs n >= 1");
  return MixedStrategy(std::vector<double>(n, 1.0 / n));
}

MixedStrategy MixedStrategy::Pure(int n, int action) {
  if (action < 0 || action >= n) {
    throw std::invalid_argument("pure strategy action out of range");
  }
  std::vector<double> p(n, 0.0);
  p[action] = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::FromWeights(std::vector<double> weights) {
  double sum = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0) {
      throw std::invalid_argument("strategy weights must be finite and >= 0");
    }
    sum += w;
  }
  if (!(sum > 0)) throw std::invalid_argument("strategy weights sum to 0");
  for (double& w : weights) w /= sum;
  return MixedStrategy(std::move(weights));
}

bool MixedStrategy::IsInterior() const {
  return std::all_of(probs_.begin(), probs_.end(),
                     [](double p) { return p > 0; });
}

double MixedStrategy::MinProbability() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

GameMatrix::GameMatrix(std::vector<std::vector<double>> u1, double u_max) {
  if (u1.empty() || u1.front().empty()) {
    throw std::invalid_argument("game matrix must have at least one entry");
  }
  rows_ = static_cast<int>(u1.size());
  cols_ = static_cast<int>(u1.front().size());
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  double largest = 0;
  for (const auto& row : u1) {
    if (static_cast<int>(row.size()) != cols_) {
      throw std::invalid_argument("game matrix rows have unequal lengths");
    }
    for (double u : row) {
      if (!std::isfinite(u)) {
        throw std::invalid_argument("game matrix entry is not finite");
      }
      largest = std::max(largest, std::abs(u));
      data_.push_back(u);
    }
  }
  if (u_max < 0) {
    u_max_ = largest;
  } else {
    if (largest > u_max) {
      throw std::invalid_argument("game matrix entry exceeds u_max");
    }
    u_max_ = u_max;
  }
}

std::vector<std::vector<double>> GameMatrix::ToRows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (int a = 0; a < rows_; ++a) {
    for (int b = 0; b < cols_; ++b) out[a][b] = u1(a, b);
  }
  return out;
}

void CheckProfile(const GameMatrix& g, const StrategyProfile& prof) {
  if (prof.p1.size() != g.rows() || prof.p2.size() != g.cols()) {
    throw std::invalid_argument("strategy profile does not match game size");
  }
}

double ExpectedValue(const GameMatrix& g, const StrategyProfile& prof,
                     Player player) {
  CheckProfile(g, prof);
  double v1 = 0;
  for (int a = 0; a < g.rows(); ++a) {
    double row = 0;
    for (int b = 0; b < g.cols(); ++b) row += g.u1(a, b) * prof.p2[b];
    v1 += prof.p1[a] * row;
  }
  return player == Player::kOne ? v1 : -v1;
}

std::vector<double> ConditionalUtilities(const GameMatrix& g,
                                         const MixedStrategy& opponent,
                                         Player player) {
  if (opponent.size() != g.num_actions(Opponent(player))) {
    throw std::invalid_argument("opponent strategy does not match game size");
  }
  std::vector<double> q;
  if (player == Player::kOne) {
    q.assign(g.rows(), 0.0);
    for (int a = 0; a < g.rows(); ++a) {
      for (int b = 0; b < g.cols(); ++b) q[a] += g.u1(a, b) * opponent[b];
    }
  } else {
    q.assign(g.cols(), 0.0);
    for (int a = 0; a < g.rows(); ++a) {
      for (int b = 0; b < g.cols(); ++b) q[b] -= g.u1(a, b) * opponent[a];
    }
  }
  return q;
}

int BestResponse(const GameMatrix& g, const MixedStrategy& opponent,
                 Player player) {
  const std::vector<double> q = ConditionalUtilities(g, opponent, player);
  // max_element returns the first maximum.
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

double Exploitability(const GameMatrix& g, const StrategyProfile& prof) {
  CheckProfile(g, prof);
  const auto q1 = ConditionalUtilities(g, prof.p2, Player::kOne);
  const auto q2 = ConditionalUtilities(g, prof.p1, Player::kTwo);
  return *std::max_element(q1.begin(), q1.end()) +
         *std::max_element(q2.begin(), q2.end());
}

bool IsEpsNash(const GameMatrix& g, const StrategyProfile& prof, double eps) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  return Exploitability(g, prof) <= eps;
}

GameMatrix MakeBiasedRps() {
  return GameMatrix({{0.0, -0.1, 0.3}, {0.1, 0.0, -0.1}, {-0.3, 0.1, 0.0}},
                    0.3);
}

GameMatrix MakeMultipleEquilibria() {
  return GameMatrix({{0.1, -0.2}, {-0.4, 0.3}, {-1.0, 0.9}}, 1.0);
}

GameMatrix MakeRandomGame(int n1, int n2, std::uint64_t seed) {
  if (n1 <= 0 || n2 <= 0) {
    throw std::invalid_argument("random game sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> u(n1, std::vector<double>(n2));
  for (auto& row : u) {
    for (double& x : row) x = unif(rng);
  }
  return GameMatrix(std::move(u), 1.0);
}

MixedStrategy SampleInteriorStrategy(int n, std::mt19937_64& rng) {
  if (n <= 0) throw std::invalid_argument("strategy size must be positive");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  for (double& x : w) {
    do {
      x = expo(rng);
    } while (!(x > 0));
  }
  return MixedStrategy::FromWeights(std::move(w));
}

MixedStrategy SampleInteriorStrategy(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return SampleInteriorStrategy(n, rng);
}

bool IsBuiltinRandomGame(const std::string& name) {
  return name == "random" || name.rfind("random:", 0) == 0;
}

GameMatrix ParseGameJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("game file is not JSON: ") +
                                e.what());
  }
  if (!j.is_object() || !j.contains("u1")) {
    throw std::invalid_argument("game file needs a \"u1\" matrix");
  }
  std::vector<std::vector<double>> u1;
  try {
    u1 = j.at("u1").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("\"u1\" must be a list of numeric rows");
  }
  double u_max = -1;
  if (j.contains("u_max")) {
    if (!j.at("u_max").is_number()) {
      throw std::invalid_argument("\"u_max\" must be a number");
    }
    u_max = j.at("u_max").get<double>();
    if (u_max < 0) throw std::invalid_argument("\"u_max\" must be >= 0");
  }
  return GameMatrix(std::move(u1), u_max);
}

GameMatrix LoadGame(const std::string& name_or_path, std::uint64_t seed) {
  if (name_or_path == "brps") return MakeBiasedRps();
  if (name_or_path == "meq") return MakeMultipleEquilibria();
  if (name_or_path == "random") return MakeRandomGame(10, 10, seed);
  if (name_or_path.rfind("random:", 0) == 0) {
    const std::string dims = name_or_path.substr(7);
    const auto x = dims.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("");
      std::size_t used1 = 0, used2 = 0;
      const std::string s1 = dims.substr(0, x), s2 = dims.substr(x + 1);
      const int n1 = std::stoi(s1, &used1);
      const int n2 = std::stoi(s2, &used2);
      if (used1 != s1.size() || used2 != s2.size()) {
        throw std::invalid_argument("");
      }
      return MakeRandomGame(n1, n2, seed);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("random game spec must look like "
                                  "random:10x10, got " + name_or_path);
    }
  }
  std::ifstream in(name_or_path);
  if (!in) {
    throw std::invalid_argument("unknown game '" + name_or_path +
                                "' (not a built-in name or readable file)");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseGameJson(buf.str());
}

}  // namespace mftrl
