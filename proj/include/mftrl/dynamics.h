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

#ifndef MFTRL_DYNAMICS_H_
#define MFTRL_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mftrl/game.h"
#include "mftrl/regularizer.h"

// Continuous-time mutant FTRL. With the entropy regularizer the flow is the
// replicator-mutator dynamics (RMD)
//
//   d/dt pi_i(a) = pi_i(a) (q_i(a) - v_i) + mu (c_i(a) - pi_i(a)),
//
// and its unique interior rest point pi^mu attracts every interior start.

namespace mftrl {

struct RmdParams {
  GameMatrix game;
  double mu = 0;
  MixedStrategy c1;
  MixedStrategy c2;

  const MixedStrategy& reference(Player p) const {
    return p == Player::kOne ? c1 : c2;
  }
  // mu > 0 and interior references of the right sizes.
  void Validate() const;

  // Uniform references.
  static RmdParams Uniform(GameMatrix game, double mu);
};

// Field vectors of both players; the profile layout is (player 1, player 2).
using ProfileField = std::pair<std::vector<double>, std::vector<double>>;

struct StationaryPoint {
  StrategyProfile profile;
  double mu = 0;
  double residual = 0;  // max-norm of the RMD field at profile
  double xi = 0;        // min_{i,a} c_i(a) / pi_i(a)
  MixedStrategy c1;
  MixedStrategy c2;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ProfileField RmdField(const RmdParams& p, const StrategyProfile& prof);

// Continuous mutant-FTRL flow in strategy space for regularizer `reg`:
// RMD for Entropy; for SquaredEuclidean (interior points), the tangent
// projection of q + (mu / pi)(c - pi).
ProfileField FlowField(const RmdParams& p, RegularizerKind reg,
                       const StrategyProfile& prof);

double FieldMaxNorm(const ProfileField& f);

struct TimedProfile {
  double time = 0;
  StrategyProfile profile;
};
using Trajectory = std::vector<TimedProfile>;

// One classical RK4 step of size dt (negative dt integrates backwards),
// followed by clamping tiny negatives and renormalizing.
StrategyProfile Rk4Step(const RmdParams& p, RegularizerKind reg,
                        const StrategyProfile& prof, double dt);

// Fixed-step RK4 from t = 0 to t_end; the trajectory holds the start, every
// `keep_every`-th state, and the final state (the last step is shortened so
// it lands on t_end exactly).
Trajectory IntegrateFlow(const RmdParams& p, RegularizerKind reg,
                         const StrategyProfile& start, double t_end, double dt,
                         int keep_every = 1);
inline Trajectory IntegrateRmd(const RmdParams& p, const StrategyProfile& start,
                               double t_end, double dt, int keep_every = 1) {
  return IntegrateFlow(p, RegularizerKind::kEntropy, start, t_end, dt,
                       keep_every);
}

// Row-major (n1 + n2) x (n1 + n2) Jacobian of RmdField in the unconstrained
// coordinates (player 1 actions first).
std::vector<double> RmdJacobian(const RmdParams& p,
                                const StrategyProfile& prof);

double StationaryXi(const RmdParams& p, const StrategyProfile& profile);

struct SolveOptions {
  double tol = 1e-12;
  std::int64_t max_field_evaluations = 10'000'000;
  // Starting profile; uniform when empty.
  std::optional<StrategyProfile> start;
};

// Integrates RMD toward its rest point, then polishes with Newton steps on
// the stationarity equations. Throws ConvergenceError when the evaluation
// budget runs out first.
StationaryPoint SolveStationary(const RmdParams& p, const SolveOptions& opts);
inline StationaryPoint SolveStationary(const RmdParams& p, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  return SolveStationary(p, opts);
}

// -mu sum_i sum_a c_i(a) (sqrt(pi_i(a)/pi^mu_i(a)) - sqrt(pi^mu_i(a)/pi_i(a)))^2
double StationaryDivergenceRate(const RmdParams& p,
                                const StationaryPoint& sp,
                                const StrategyProfile& prof);

// Right-hand side of d/dt D(pi, pi^t):
//   sum_i v_i(pi_i^t, pi_-i) + 2 mu - mu sum_i sum_a c_i(a) pi_i(a)/pi^t_i(a).
double DivergenceRate(const RmdParams& p, const StrategyProfile& fixed,
                      const StrategyProfile& current);

// (v_i(test, pi^mu_-i), v_i(pi^mu) + mu - mu sum_a c_i(a) test(a)/pi^mu_i(a)).
std::pair<double, double> DeviationValueIdentity(const RmdParams& p,
                                                 const StationaryPoint& sp,
                                                 const MixedStrategy& test,
                                                 Player player);

// 2 mu + 2 u_max sqrt(ln 2 * kl0) exp(-mu xi t / 2).
double ExploitabilityBound(const StationaryPoint& sp, double kl0, double u_max,
                           double t);

struct KlDecayReport {
  std::vector<double> times;
  std::vector<double> kl;
  std::vector<double> bound;
  double xi = 0;
  double max_bound_ratio = 0;  // max_t kl / bound
  bool bound_holds = false;    // kl <= bound * (1 + 1e-6) everywhere
  double fitted_slope = 0;     // least-squares slope of ln kl versus t
  int fitted_samples = 0;
};

// Samples KL(pi^mu, pi^t) along an RMD trajectory every `sample_every`
// time units and checks the exponential decay bound. Only samples with
// KL above `fit_floor` enter the slope fit.
KlDecayReport KlDecayCertificate(const RmdParams& p,
                                 const StrategyProfile& start, double horizon,
                                 double dt, double sample_every = 1.0,
                                 double fit_floor = 1e-12);

// Exploitability of pi^mu within 2 mu + 2 * residual.
bool StationaryIs2MuNash(const GameMatrix& g, const StationaryPoint& sp);

}  // namespace mftrl

#endif  // MFTRL_DYNAMICS_H_
