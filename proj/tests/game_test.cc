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
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "lp_oracle.h"
#include "mftrl/game.h"

namespace mftrl {
namespace {

using doctest::Approx;

MixedStrategy S(std::vector<double> p) { return MixedStrategy(std::move(p)); }

TEST_CASE("mixed strategy validation") {
  CHECK_NOTHROW(S({0.25, 0.75}));
  CHECK_THROWS_AS(S({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(S({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(S({NAN, 1.0}), std::invalid_argument);
  CHECK(S({0.5, 0.5}).IsInterior());
  CHECK_FALSE(S({1.0, 0.0}).IsInterior());
  const MixedStrategy near = S({0.5 + 4e-13, 0.5});
  CHECK(near[0] + near[1] == doctest::Approx(1.0).epsilon(1e-16));
  CHECK(MixedStrategy::Pure(3, 1) == S({0, 1, 0}));
  CHECK(MixedStrategy::FromWeights({1, 3}) == S({0.25, 0.75}));
}

TEST_CASE("built-in matrices") {
  const GameMatrix brps = MakeBiasedRps();
  const std::vector<std::vector<double>> want = {
      {0, -0.1, 0.3}, {0.1, 0, -0.1}, {-0.3, 0.1, 0}};
  CHECK(brps.ToRows() == want);
  CHECK(brps.u_max() == 0.3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(brps.u1(a, b) == -brps.u1(b, a));
  }
  const GameMatrix meq = MakeMultipleEquilibria();
  const std::vector<std::vector<double>> want_meq = {
      {0.1, -0.2}, {-0.4, 0.3}, {-1, 0.9}};
  CHECK(meq.ToRows() == want_meq);
  CHECK(meq.u_max() == 1.0);
}

TEST_CASE("game matrix rejects entries above u_max") {
  CHECK_THROWS_AS(GameMatrix({{0.5, -2}}, 1.0), std::invalid_argument);
  CHECK(GameMatrix({{0.5, -2}}).u_max() == 2.0);
}

TEST_CASE("expected value") {
  const GameMatrix brps = MakeBiasedRps();
  const StrategyProfile uni{MixedStrategy::Uniform(3), MixedStrategy::Uniform(3)};
  CHECK(std::abs(ExpectedValue(brps, uni, Player::kOne)) <= 1e-17);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const StrategyProfile pure{MixedStrategy::Pure(3, a),
                                 MixedStrategy::Pure(3, b)};
      CHECK(ExpectedValue(brps, pure, Player::kOne) == brps.u1(a, b));
    }
  }
  const GameMatrix pennies({{1, -1}, {-1, 1}});
  CHECK(ExpectedValue(pennies,
                      {MixedStrategy::Uniform(2), MixedStrategy::Uniform(2)},
                      Player::kOne) == 0.0);
}

TEST_CASE("zero-sum identity under fuzz") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const GameMatrix g = MakeRandomGame(1 + k % 5, 1 + (k / 5) % 5, k);
    const StrategyProfile prof{SampleInteriorStrategy(g.rows(), rng),
                               SampleInteriorStrategy(g.cols(), rng)};
    CHECK(std::abs(ExpectedValue(g, prof, Player::kOne) +
                   ExpectedValue(g, prof, Player::kTwo)) <= 1e-12);
    CHECK(Exploitability(g, prof) >= -1e-12);
  }
}

TEST_CASE("conditional utilities") {
  const GameMatrix brps = MakeBiasedRps();
  const auto q = ConditionalUtilities(brps, MixedStrategy::Uniform(3),
                                      Player::kOne);
  CHECK(q[0] == Approx(1.0 / 15).epsilon(1e-14));
  CHECK(std::abs(q[1]) <= 1e-17);
  CHECK(q[2] == Approx(-1.0 / 15).epsilon(1e-14));
  const auto col = ConditionalUtilities(brps, MixedStrategy::Pure(3, 2),
                                        Player::kOne);
  CHECK(col == std::vector<double>{0.3, -0.1, 0});
  const auto qm = ConditionalUtilities(MakeMultipleEquilibria(),
                                       MixedStrategy::Uniform(2), Player::kOne);
  for (double v : qm) CHECK(v == Approx(-0.05).epsilon(1e-13));
  CHECK_THROWS_AS(ConditionalUtilities(brps, MixedStrategy::Uniform(2),
                                       Player::kOne),
                  std::invalid_argument);
}

TEST_CASE("conditional utilities pair with expected value") {
  std::mt19937_64 rng(2);
  const GameMatrix g = MakeRandomGame(4, 3, 9);
  const StrategyProfile prof{SampleInteriorStrategy(4, rng),
                             SampleInteriorStrategy(3, rng)};
  const auto q1 = ConditionalUtilities(g, prof.p2, Player::kOne);
  const auto q2 = ConditionalUtilities(g, prof.p1, Player::kTwo);
  double v1 = 0, v2 = 0;
  for (int a = 0; a < 4; ++a) v1 += q1[a] * prof.p1[a];
  for (int b = 0; b < 3; ++b) v2 += q2[b] * prof.p2[b];
  CHECK(v1 == Approx(ExpectedValue(g, prof, Player::kOne)).epsilon(1e-14));
  CHECK(v2 == Approx(ExpectedValue(g, prof, Player::kTwo)).epsilon(1e-14));
}

TEST_CASE("exploitability examples") {
  const GameMatrix brps = MakeBiasedRps();
  const MixedStrategy eq = S({0.2, 0.6, 0.2});
  CHECK(std::abs(Exploitability(brps, {eq, eq})) <= 1e-12);
  const StrategyProfile uni{MixedStrategy::Uniform(3), MixedStrategy::Uniform(3)};
  CHECK(Exploitability(brps, uni) == Approx(2.0 / 15).epsilon(1e-13));
  CHECK_FALSE(IsEpsNash(brps, uni, 0.1));
  CHECK(IsEpsNash(brps, uni, 0.14));
  CHECK(IsEpsNash(brps, {eq, eq}, 1e-12));

  const GameMatrix meq = MakeMultipleEquilibria();
  for (double x1 : {0.7, 0.75, 0.8, 19.0 / 22}) {
    const double x2 = -22.0 / 12 * x1 + 19.0 / 12;
    const double x3 = 10.0 / 12 * x1 - 7.0 / 12;
    const MixedStrategy x = MixedStrategy::FromWeights(
        {x1, std::max(0.0, x2), std::max(0.0, x3)});
    CHECK(std::abs(Exploitability(meq, {x, MixedStrategy::Uniform(2)})) <=
          1e-12);
  }
}

TEST_CASE("LP oracle recovers the BRPS equilibrium") {
  const auto sol = testing::SolveMatrixGame(MakeBiasedRps().ToRows());
  CHECK(std::abs(sol.value) <= 1e-12);
  const std::vector<double> want = {0.2, 0.6, 0.2};
  for (int a = 0; a < 3; ++a) {
    CHECK(sol.row[a] == Approx(want[a]).epsilon(1e-12));
    CHECK(sol.col[a] == Approx(want[a]).epsilon(1e-12));
  }
}

TEST_CASE("pure best responses match LP best responses") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const int n1 = 1 + k % 5, n2 = 1 + (k / 5) % 5;
    const GameMatrix g = MakeRandomGame(n1, n2, 1000 + k);
    const StrategyProfile prof{SampleInteriorStrategy(n1, rng),
                               SampleInteriorStrategy(n2, rng)};
    const double lp =
        testing::LpBestResponseValue(
            ConditionalUtilities(g, prof.p2, Player::kOne)) +
        testing::LpBestResponseValue(
            ConditionalUtilities(g, prof.p1, Player::kTwo));
    CHECK(std::abs(Exploitability(g, prof) - lp) <= 1e-9);
  }
}

TEST_CASE("LP Nash of random games has zero exploitability") {
  for (int k = 0; k < 20; ++k) {
    const GameMatrix g = MakeRandomGame(2 + k % 4, 2 + (k / 4) % 4, 50 + k);
    const auto sol = testing::SolveMatrixGame(g.ToRows());
    const StrategyProfile prof{MixedStrategy::FromWeights(sol.row),
                               MixedStrategy::FromWeights(sol.col)};
    CHECK(std::abs(Exploitability(g, prof)) <= 1e-9);
  }
}

TEST_CASE("best response ties go to the lowest index") {
  const GameMatrix g({{1, 0}, {1, 0}, {0, 1}});
  CHECK(BestResponse(g, MixedStrategy::Pure(2, 0), Player::kOne) == 0);
  CHECK(BestResponse(MakeBiasedRps(), S({0.2, 0.6, 0.2}), Player::kTwo) == 0);
}

TEST_CASE("random games") {
  const GameMatrix a = MakeRandomGame(10, 10, 4);
  CHECK(a == MakeRandomGame(10, 10, 4));
  CHECK_FALSE(a == MakeRandomGame(10, 10, 5));
  CHECK(a.u_max() == 1.0);
  const GameMatrix big = MakeRandomGame(50, 50, 1);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      CHECK(big.u1(i, j) >= 0.0);
      CHECK(big.u1(i, j) <= 1.0);
    }
  }
  CHECK_THROWS_AS(MakeRandomGame(0, 3, 1), std::invalid_argument);
}

TEST_CASE("interior sampling") {
  CHECK(SampleInteriorStrategy(1, 0ULL) == S({1.0}));
  CHECK_THROWS_AS(SampleInteriorStrategy(0, 0ULL), std::invalid_argument);
  std::mt19937_64 rng(5);
  std::vector<double> mean(3, 0.0);
  constexpr int kDraws = 100000;
  for (int k = 0; k < kDraws; ++k) {
    const MixedStrategy s = SampleInteriorStrategy(3, rng);
    CHECK(s.IsInterior());
    for (int a = 0; a < 3; ++a) mean[a] += s[a] / kDraws;
  }
  for (double m : mean) CHECK(std::abs(m - 1.0 / 3) <= 0.01);
}

TEST_CASE("game loading") {
  CHECK(LoadGame("brps") == MakeBiasedRps());
  CHECK(LoadGame("meq") == MakeMultipleEquilibria());
  CHECK(LoadGame("random", 3) == MakeRandomGame(10, 10, 3));
  CHECK(LoadGame("random:4x6", 3) == MakeRandomGame(4, 6, 3));
  CHECK(IsBuiltinRandomGame("random"));
  CHECK_FALSE(IsBuiltinRandomGame("brps"));
  const GameMatrix parsed =
      ParseGameJson(R"({"u1": [[1, -1], [-1, 1]], "u_max": 1})");
  CHECK(parsed == GameMatrix({{1, -1}, {-1, 1}}, 1));
  CHECK_THROWS(ParseGameJson(R"({"u1": [[1, -1], [-1]], "u_max": 1})"));
  CHECK_THROWS(ParseGameJson(R"({"u1": [[3]], "u_max": 1})"));
  const char* path = "game_test_pennies.json";
  {
    std::ofstream f(path);
    f << R"({"u1": [[1, -1], [-1, 1]], "u_max": 1})";
  }
  CHECK(LoadGame(path) == parsed);
  std::remove(path);
  CHECK_THROWS(LoadGame("no_such_game"));
}

}  // namespace
}  // namespace mftrl
