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

#include "mftrl/certificates.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mftrl/dynamics.h"
#include "mftrl/experiment.h"
#include "mftrl/game.h"
#include "mftrl/learner.h"
#include "mftrl/regularizer.h"

namespace mftrl {
namespace {

constexpr double kFdStep = 1e-4;

StrategyProfile RandomInteriorProfile(const GameMatrix& g,
                                      std::mt19937_64& rng) {
  MixedStrategy p1 = SampleInteriorStrategy(g.rows(), rng);
  MixedStrategy p2 = SampleInteriorStrategy(g.cols(), rng);
  return {std::move(p1), std::move(p2)};
}

double MaxAbsDiff(const StrategyProfile& a, const StrategyProfile& b) {
  double m = 0;
  for (Player pl : {Player::kOne, Player::kTwo}) {
    for (int i = 0; i < a.of(pl).size(); ++i) {
      m = std::max(m, std::abs(a.of(pl)[i] - b.of(pl)[i]));
    }
  }
  return m;
}

// Worst |fd - expected| / max(1e-6, 1e-3 |expected|) at 20 interior sample
// times of a flow trajectory, for the divergence D(anchor, pi^t).
struct FdCheck {
  double worst = 0;
  int samples = 0;
  int skipped = 0;
};

FdCheck CheckDivergenceDerivative(
    const RmdParams& p, RegularizerKind reg, const StrategyProfile& start,
    const StrategyProfile& anchor, double horizon,
    const std::function<double(const StrategyProfile&)>& expected) {
  constexpr double kDt = 1e-2;
  constexpr int kSamples = 20;
  const int keep = static_cast<int>(std::lround(horizon / kSamples / kDt));
  const Trajectory traj = IntegrateFlow(p, reg, start, horizon, kDt, keep);
  FdCheck out;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const StrategyProfile& x = traj[i].profile;
    if (std::min(x.p1.MinProbability(), x.p2.MinProbability()) <= 1e-6) {
      ++out.skipped;
      continue;
    }
    const StrategyProfile fwd = Rk4Step(p, reg, x, kFdStep);
    const StrategyProfile bwd = Rk4Step(p, reg, x, -kFdStep);
    const double fd = (ProfileBregman(reg, anchor, fwd) -
                       ProfileBregman(reg, anchor, bwd)) /
                      (2 * kFdStep);
    const double want = expected(x);
    const double allowed = std::max(1e-6, 1e-3 * std::abs(want));
    out.worst = std::max(out.worst, std::abs(fd - want) / allowed);
    ++out.samples;
  }
  return out;
}

CertificateResult EulerConsistency() {
  const RmdParams p = RmdParams::Uniform(MakeBiasedRps(), 0.1);
  std::mt19937_64 rng(11);
  auto gap = [&](const StrategyProfile& prof, double eta) {
    std::optional<MutationConfig> m1 = MutationConfig{p.mu, p.c1, {}};
    std::optional<MutationConfig> m2 = MutationConfig{p.mu, p.c2, {}};
    LearnerState s1 = LearnerState::Create(Player::kOne,
                                           RegularizerKind::kEntropy, eta,
                                           Algorithm::kMFtrl, prof.p1, m1);
    LearnerState s2 = LearnerState::Create(Player::kTwo,
                                           RegularizerKind::kEntropy, eta,
                                           Algorithm::kMFtrl, prof.p2, m2);
    s1 = FullInfoStep(std::move(s1),
                      ConditionalUtilities(p.game, prof.p2, Player::kOne));
    s2 = FullInfoStep(std::move(s2),
                      ConditionalUtilities(p.game, prof.p1, Player::kTwo));
    const ProfileField f = RmdField(p, prof);
    const MixedStrategy a1 = CurrentStrategy(s1), a2 = CurrentStrategy(s2);
    double m = 0;
    for (int a = 0; a < a1.size(); ++a) {
      m = std::max(m, std::abs(a1[a] - (prof.p1[a] + eta * f.first[a])));
    }
    for (int b = 0; b < a2.size(); ++b) {
      m = std::max(m, std::abs(a2[b] - (prof.p2[b] + eta * f.second[b])));
    }
    return m;
  };
  double worst = 0, lo = 1e9, hi = 0;
  for (int k = 0; k < 10; ++k) {
    const StrategyProfile prof = RandomInteriorProfile(p.game, rng);
    const double ratio = gap(prof, 1e-2) / gap(prof, 5e-3);
    worst = std::max(worst, std::abs(ratio - 4.0));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  std::ostringstream d;
  d << "gap ratio for eta 1e-2 -> 5e-3 over 10 BRPS profiles in [" << lo
    << ", " << hi << "]";
  return {"theorem1", worst <= 0.5, worst, 0.5, d.str()};
}

CertificateResult StationaryRate() {
  double worst = 0;
  int samples = 0, skipped = 0;
  std::mt19937_64 rng(7);
  for (const GameMatrix& g : {MakeBiasedRps(), MakeMultipleEquilibria()}) {
    const RmdParams p = RmdParams::Uniform(g, 0.1);
    const StationaryPoint sp = SolveStationary(p, 1e-12);
    const StrategyProfile start = RandomInteriorProfile(g, rng);
    for (RegularizerKind reg :
         {RegularizerKind::kEntropy, RegularizerKind::kSquaredEuclidean}) {
      const FdCheck c = CheckDivergenceDerivative(
          p, reg, start, sp.profile, 40.0,
          [&](const StrategyProfile& x) {
            return StationaryDivergenceRate(p, sp, x);
          });
      worst = std::max(worst, c.worst);
      samples += c.samples;
      skipped += c.skipped;
    }
  }
  std::ostringstream d;
  d << samples << " finite-difference samples (BRPS, M-Eq; entropy, "
    << "euclidean), " << skipped << " skipped near the boundary; worst "
    << "error / tolerance = " << worst;
  return {"theorem2", worst <= 1.0 && samples > 0, worst, 1.0, d.str()};
}

CertificateResult FixedAnchorRate() {
  double worst = 0;
  int samples = 0;
  std::mt19937_64 rng(8);
  for (const GameMatrix& g : {MakeBiasedRps(), MakeMultipleEquilibria()}) {
    const RmdParams p = RmdParams::Uniform(g, 0.1);
    for (RegularizerKind reg :
         {RegularizerKind::kEntropy, RegularizerKind::kSquaredEuclidean}) {
      const StrategyProfile anchor = RandomInteriorProfile(g, rng);
      const StrategyProfile start = RandomInteriorProfile(g, rng);
      const FdCheck c = CheckDivergenceDerivative(
          p, reg, start, anchor, 40.0,
          [&](const StrategyProfile& x) {
            return DivergenceRate(p, anchor, x);
          });
      worst = std::max(worst, c.worst);
      samples += c.samples;
    }
  }
  std::ostringstream d;
  d << samples << " samples; worst error / tolerance = " << worst;
  return {"lemma1", worst <= 1.0 && samples > 0, worst, 1.0, d.str()};
}

CertificateResult KlDecay() {
  const RmdParams p = RmdParams::Uniform(MakeBiasedRps(), 0.1);
  const StrategyProfile start{MixedStrategy::Uniform(3),
                              MixedStrategy::Uniform(3)};
  const KlDecayReport rep = KlDecayCertificate(p, start, 200.0, 1e-2);
  const double rate = p.mu * rep.xi;
  const bool slope_ok = rep.fitted_samples >= 2 &&
                        rep.fitted_slope <= -0.95 * rate;
  std::ostringstream d;
  d << "max KL/bound = " << rep.max_bound_ratio << ", fitted slope "
    << rep.fitted_slope << " vs -0.95 mu xi = " << -0.95 * rate << " ("
    << rep.fitted_samples << " samples)";
  return {"corollary1", rep.bound_holds && slope_ok, rep.max_bound_ratio,
          1.0 + 1e-6, d.str()};
}

CertificateResult ExploitabilityDecay() {
  const GameMatrix g = MakeBiasedRps();
  const RmdParams p = RmdParams::Uniform(g, 0.1);
  const StationaryPoint sp = SolveStationary(p, 1e-12);
  const double eta = 1e-3;
  const StrategyProfile start{MixedStrategy::Uniform(3),
                              MixedStrategy::Uniform(3)};
  const double kl0 = ProfileKl(sp.profile, start);
  LearnerState s1 = LearnerState::Create(
      Player::kOne, RegularizerKind::kEntropy, eta, Algorithm::kMFtrl,
      start.p1, MutationConfig{p.mu, p.c1, {}});
  LearnerState s2 = LearnerState::Create(
      Player::kTwo, RegularizerKind::kEntropy, eta, Algorithm::kMFtrl,
      start.p2, MutationConfig{p.mu, p.c2, {}});
  const SelfPlayResult run = RunSelfPlay(g, std::move(s1), std::move(s2),
                                         200000, Feedback::kFull, 100, 0);
  double worst = -1e9;
  for (const TrajectoryPoint& pt : run.points) {
    const double bound = ExploitabilityBound(
        sp, kl0, g.u_max(), eta * static_cast<double>(pt.iteration));
    worst = std::max(worst, Exploitability(g, pt.profile) - bound);
  }
  std::ostringstream d;
  d << run.points.size() << " recorded points of discrete M-FTRL "
    << "(eta 1e-3, 2e5 steps); max exploit - bound = " << worst;
  return {"theorem3", worst <= 0.02, worst, 0.02, d.str()};
}

CertificateResult DeviationValues() {
  const RmdParams p = RmdParams::Uniform(MakeBiasedRps(), 0.1);
  const StationaryPoint sp = SolveStationary(p, 1e-12);
  std::mt19937_64 rng(9);
  double worst = 0;
  for (Player pl : {Player::kOne, Player::kTwo}) {
    std::vector<MixedStrategy> tests = {MixedStrategy::Pure(3, 0)};
    for (int k = 0; k < 100; ++k) {
      tests.push_back(SampleInteriorStrategy(3, rng));
    }
    for (const MixedStrategy& t : tests) {
      const auto [lhs, rhs] = DeviationValueIdentity(p, sp, t, pl);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return {"lemma2", worst <= 1e-8, worst, 1e-8,
          "202 deviations against pi^mu on BRPS (mu 0.1)"};
}

CertificateResult ConjugateGap() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0;
  int checked = 0;
  for (RegularizerKind reg :
       {RegularizerKind::kEntropy, RegularizerKind::kSquaredEuclidean}) {
    for (int k = 0; k < 500; ++k) {
      const int n = 2 + k % 5;
      std::vector<double> z(n);
      for (double& x : z) x = 0.3 * normal(rng);
      const MixedStrategy pi = MirrorArgmax(reg, z);
      if (!pi.IsInterior()) continue;
      const MixedStrategy other = SampleInteriorStrategy(n, rng);
      const double lhs = Bregman(reg, other, pi);
      const double rhs =
          ConjugateValue(reg, z) -
          std::inner_product(z.begin(), z.end(), other.probs().begin(), 0.0) +
          Psi(reg, other.probs());
      worst = std::max(worst, std::abs(lhs - rhs));
      ++checked;
    }
  }
  std::ostringstream d;
  d << checked << " random (z, pi) pairs with interior argmax";
  return {"lemma3", worst <= 1e-9, worst, 1e-9, d.str()};
}

CertificateResult InteriorFloor() {
  double worst = 1e300;
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n1 = 2 + static_cast<int>(seed % 4);
    const int n2 = 2 + static_cast<int>((seed / 4) % 3);
    const GameMatrix g = MakeRandomGame(n1, n2, 100 + seed);
    for (double mu : {0.01, 0.1, 1.0}) {
      RmdParams p;
      p.game = g;
      p.mu = mu;
      p.c1 = SampleInteriorStrategy(n1, 200 + seed);
      p.c2 = SampleInteriorStrategy(n2, 300 + seed);
      const StationaryPoint sp = SolveStationary(p, 1e-12);
      for (Player pl : {Player::kOne, Player::kTwo}) {
        const MixedStrategy& c = p.reference(pl);
        const double floor =
            mu * c.MinProbability() / (2 * g.u_max() + mu);
        worst = std::min(worst, sp.profile.of(pl).MinProbability() / floor);
      }
      ++solved;
    }
  }
  std::ostringstream d;
  d << solved << " rest points on random games; min over players of "
    << "min pi / (mu min c / (2 u_max + mu)) = " << worst;
  return {"lemma4", worst > 1.0, worst, 1.0, d.str()};
}

CertificateResult Uniqueness() {
  double worst = 0;
  std::mt19937_64 rng(12);
  for (const GameMatrix& g : {MakeBiasedRps(), MakeRandomGame(10, 10, 0)}) {
    const RmdParams p = RmdParams::Uniform(g, 0.1);
    std::vector<StationaryPoint> sols;
    for (int k = 0; k < 10; ++k) {
      SolveOptions opts;
      opts.start = RandomInteriorProfile(g, rng);
      sols.push_back(SolveStationary(p, opts));
    }
    for (const StationaryPoint& s : sols) {
      worst = std::max(worst, MaxAbsDiff(s.profile, sols.front().profile));
    }
  }
  return {"uniqueness", worst <= 1e-6, worst, 1e-6,
          "10 random starts each on BRPS and a seed-0 random 10x10 game"};
}

using Runner = CertificateResult (*)();

const std::map<std::string, Runner>& Registry() {
  static const auto* registry = new std::map<std::string, Runner>{
      {"theorem1", &EulerConsistency},
      {"theorem2", &StationaryRate},
      {"corollary1", &KlDecay},
      {"theorem3", &ExploitabilityDecay},
      {"lemma1", &FixedAnchorRate},
      {"lemma2", &DeviationValues},
      {"lemma3", &ConjugateGap},
      {"lemma4", &InteriorFloor},
      {"uniqueness", &Uniqueness}};
  return *registry;
}

}  // namespace

const std::vector<std::string>& CertificateNames() {
  static const std::vector<std::string> names = {
      "theorem1", "theorem2", "corollary1", "theorem3", "lemma1",
      "lemma2",   "lemma3",   "lemma4",     "uniqueness"};
  return names;
}

CertificateResult RunCertificate(const std::string& name) {
  const auto it = Registry().find(name);
  if (it == Registry().end()) {
    throw std::invalid_argument("unknown certificate '" + name + "'");
  }
  return it->second();
}

std::string SummaryLine(const CertificateResult& r) {
  return r.name + "," + (r.pass ? "pass" : "fail") + "," +
         FormatReal(r.observed) + "," + FormatReal(r.threshold);
}

}  // namespace mftrl
