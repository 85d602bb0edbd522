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
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "mftrl/game.h"
#include "mftrl/regularizer.h"

namespace mftrl {
namespace {

using doctest::Approx;
constexpr RegularizerKind kEnt = RegularizerKind::kEntropy;
constexpr RegularizerKind kEuc = RegularizerKind::kSquaredEuclidean;

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

TEST_CASE("names") {
  CHECK(ParseRegularizer("entropy") == kEnt);
  CHECK(ParseRegularizer("euclidean") == kEuc);
  CHECK(RegularizerName(kEuc) == "euclidean");
  CHECK_THROWS_AS(ParseRegularizer("tsallis"), std::invalid_argument);
}

TEST_CASE("score vectors stay finite") {
  CHECK_THROWS_AS(ScoreVector({1.0, INFINITY}), std::invalid_argument);
  ScoreVector z({0.0, 1.0});
  z.AddScaled(std::vector<double>{2.0, -1.0}, 0.5);
  CHECK(z == ScoreVector({1.0, 0.5}));
}

TEST_CASE("mirror argmax examples") {
  const MixedStrategy u = MirrorArgmax(kEnt, std::vector<double>{0, 0, 0});
  for (int a = 0; a < 3; ++a) CHECK(u[a] == Approx(1.0 / 3).epsilon(1e-15));
  const MixedStrategy h =
      MirrorArgmax(kEnt, std::vector<double>{std::log(2.0), 0, 0});
  CHECK(h[0] == Approx(0.5).epsilon(1e-15));
  CHECK(h[1] == Approx(0.25).epsilon(1e-15));
  CHECK(h[2] == Approx(0.25).epsilon(1e-15));
  CHECK(MirrorArgmax(kEuc, std::vector<double>{2, 0}) ==
        MixedStrategy({1.0, 0.0}));
  CHECK_THROWS_AS(MirrorArgmax(kEnt, std::vector<double>{NAN, 0}),
                  std::invalid_argument);
  const MixedStrategy big = MirrorArgmax(kEnt, std::vector<double>{1e5, 0});
  CHECK(big[0] == 1.0);
}

TEST_CASE("squared-Euclidean argmax matches a grid search") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    const int n = 2 + k % 2;
    std::vector<double> z(n);
    for (double& x : z) x = normal(rng);
    const MixedStrategy p = MirrorArgmax(kEuc, z);
    std::vector<double> best;
    double best_val = -1e300;
    constexpr int kGrid = 1000;
    for (int i = 0; i <= kGrid; ++i) {
      for (int j = 0; j <= (n == 3 ? kGrid - i : 0); ++j) {
        std::vector<double> g = n == 2
                                    ? std::vector<double>{i * 1e-3, 1 - i * 1e-3}
                                    : std::vector<double>{i * 1e-3, j * 1e-3,
                                                          1 - (i + j) * 1e-3};
        const double v = Dot(z, g) - Psi(kEuc, g);
        if (v > best_val) {
          best_val = v;
          best = g;
        }
      }
    }
    for (int a = 0; a < n; ++a) CHECK(std::abs(p[a] - best[a]) <= 2e-3);
  }
}

TEST_CASE("argmax optimality under fuzz") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (RegularizerKind reg : {kEnt, kEuc}) {
    for (int k = 0; k < 20; ++k) {
      const int n = 1 + k % 6;
      std::vector<double> z(n);
      for (double& x : z) x = normal(rng);
      const MixedStrategy p = MirrorArgmax(reg, z);
      const double top = Dot(z, p.probs()) - Psi(reg, p.probs());
      CHECK(top == Approx(ConjugateValue(reg, z)).epsilon(1e-12));
      double worst = -1e300;
      for (int s = 0; s < 10000; ++s) {
        const MixedStrategy q = SampleInteriorStrategy(n, rng);
        worst = std::max(worst, Dot(z, q.probs()) - Psi(reg, q.probs()));
      }
      CHECK(top >= worst - 1e-9);
    }
  }
}

TEST_CASE("softmax shift invariance") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> z(4), shifted(4), moved(4);
    for (double& x : z) x = normal(rng);
    // Shifts that keep every entry exactly representable.
    const double c = std::ldexp(1.0, k % 7) * ((k % 2) ? 1 : -1);
    const double odd = normal(rng) * 50;
    for (int a = 0; a < 4; ++a) {
      z[a] = std::ldexp(std::round(std::ldexp(z[a], 20)), -20);
      shifted[a] = z[a] + c;
      moved[a] = z[a] + odd;
    }
    CHECK(MirrorArgmax(kEnt, z) == MirrorArgmax(kEnt, shifted));
    const MixedStrategy a = MirrorArgmax(kEnt, z), b = MirrorArgmax(kEnt, moved);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13);
  }
}

TEST_CASE("bregman and kl examples") {
  const MixedStrategy x({1.0, 0.0}), y({0.5, 0.5}), e2({0.0, 1.0});
  CHECK(Bregman(kEnt, y, y) == 0.0);
  CHECK(Bregman(kEuc, x, x) == 0.0);
  CHECK(Bregman(kEnt, x, y) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(Bregman(kEuc, x, e2) == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Kl(y, x), std::invalid_argument);
  const MixedStrategy eq({0.2, 0.6, 0.2}), u = MixedStrategy::Uniform(3);
  const double want = 0.2 * std::log(0.6) + 0.6 * std::log(1.8) +
                      0.2 * std::log(0.6);
  CHECK(Kl(eq, u) == Approx(want).epsilon(1e-14));
  CHECK(want == Approx(0.14836).epsilon(1e-4));
  CHECK(ProfileKl({eq, x}, {u, y}) ==
        Approx(Kl(eq, u) + Kl(x, y)).epsilon(1e-15));
}

TEST_CASE("bregman agrees with its definition and is nonnegative") {
  std::mt19937_64 rng(4);
  for (RegularizerKind reg : {kEnt, kEuc}) {
    for (int k = 0; k < 200; ++k) {
      const int n = 2 + k % 5;
      const MixedStrategy x = SampleInteriorStrategy(n, rng);
      const MixedStrategy y = SampleInteriorStrategy(n, rng);
      const auto grad = PsiGradient(reg, y.probs());
      double lin = 0;
      for (int a = 0; a < n; ++a) lin += grad[a] * (x[a] - y[a]);
      const double def = Psi(reg, x.probs()) - Psi(reg, y.probs()) - lin;
      const double d = Bregman(reg, x, y);
      CHECK(d >= 0.0);
      CHECK(std::abs(d - def) <= 1e-12);
    }
  }
  CHECK(Kl(MixedStrategy({1.0, 0.0}), MixedStrategy({1.0 - 1e-12, 1e-12})) ==
        Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("psi gradient matches central differences") {
  std::mt19937_64 rng(5);
  constexpr double h = 1e-6;
  for (RegularizerKind reg : {kEnt, kEuc}) {
    for (int k = 0; k < 50; ++k) {
      const int n = 2 + k % 5;
      const MixedStrategy p = SampleInteriorStrategy(n, rng);
      std::vector<double> x(p.probs().begin(), p.probs().end());
      for (double& v : x) v = 0.05 + 0.9 * v;  // keep away from zero
      const auto grad = PsiGradient(reg, x);
      for (int a = 0; a < n; ++a) {
        std::vector<double> hi = x, lo = x;
        hi[a] += h;
        lo[a] -= h;
        const double fd = (Psi(reg, hi) - Psi(reg, lo)) / (2 * h);
        CHECK(std::abs(fd - grad[a]) <= 1e-5 * std::max(1.0, std::abs(grad[a])));
      }
    }
  }
}

TEST_CASE("conjugate value examples") {
  CHECK(ConjugateValue(kEnt, std::vector<double>{0, 0, 0}) ==
        Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(ConjugateValue(kEnt, std::vector<double>{1, 1}) ==
        Approx(1 + std::log(2.0)).epsilon(1e-15));
  CHECK(ConjugateValue(kEuc, std::vector<double>{2, 0}) ==
        Approx(1.5).epsilon(1e-15));
  CHECK(LogSumExp(std::vector<double>{1000, 1000}) ==
        Approx(1000 + std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("divergence to a mirror argmax equals the conjugate gap") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (RegularizerKind reg : {kEnt, kEuc}) {
    int checked = 0;
    double profile_lhs = 0, profile_rhs = 0;
    for (int k = 0; k < 400; ++k) {
      const int n = 2 + k % 5;
      std::vector<double> z(n);
      for (double& v : z) v = normal(rng);
      const MixedStrategy target = MirrorArgmax(reg, z);
      if (!target.IsInterior()) continue;
      const MixedStrategy pi = SampleInteriorStrategy(n, rng);
      const double lhs = Bregman(reg, pi, target);
      const double rhs =
          ConjugateValue(reg, z) - Dot(z, pi.probs()) + Psi(reg, pi.probs());
      CHECK(std::abs(lhs - rhs) <= 1e-9);
      profile_lhs += lhs;
      profile_rhs += rhs;
      ++checked;
    }
    CHECK(checked > 100);
    CHECK(std::abs(profile_lhs - profile_rhs) <= 1e-9);
  }
}

TEST_CASE("inverting the mirror argmax") {
  std::mt19937_64 rng(7);
  for (RegularizerKind reg : {kEnt, kEuc}) {
    const MixedStrategy pi = SampleInteriorStrategy(5, rng);
    const MixedStrategy back = MirrorArgmax(reg, InvertMirrorArgmax(reg, pi));
    for (int a = 0; a < 5; ++a) CHECK(std::abs(back[a] - pi[a]) <= 1e-15);
  }
}

TEST_CASE("simplex projection") {
  const auto p = ProjectOntoSimplex(std::vector<double>{0.5, 0.5, 0.5});
  for (double v : p) CHECK(v == Approx(1.0 / 3).epsilon(1e-15));
  const auto q = ProjectOntoSimplex(std::vector<double>{3, 0, -1});
  CHECK(q == std::vector<double>{1, 0, 0});
}

}  // namespace
}  // namespace mftrl
