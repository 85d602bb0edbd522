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

#include "mftrl/dynamics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mftrl/learner.h"

namespace mftrl {
namespace {

// Stacked state (player 1 then player 2). Intermediate RK stages are not
// exactly on the simplex, so the field works on raw vectors.
using State = std::vector<double>;

State Stack(const StrategyProfile& prof) {
  State x(prof.p1.probs().begin(), prof.p1.probs().end());
  x.insert(x.end(), prof.p2.probs().begin(), prof.p2.probs().end());
  return x;
}

struct Payoffs {
  std::vector<double> q1, q2;
  double v1 = 0, v2 = 0;
};

Payoffs ComputePayoffs(const GameMatrix& g, const double* x1,
                       const double* x2) {
  const int n1 = g.rows(), n2 = g.cols();
  Payoffs out;
  out.q1.assign(n1, 0.0);
  out.q2.assign(n2, 0.0);
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) {
      const double u = g.u1(a, b);
      out.q1[a] += u * x2[b];
      out.q2[b] -= u * x1[a];
    }
  }
  for (int a = 0; a < n1; ++a) out.v1 += x1[a] * out.q1[a];
  for (int b = 0; b < n2; ++b) out.v2 += x2[b] * out.q2[b];
  return out;
}

void FieldInto(const RmdParams& p, RegularizerKind reg, const State& x,
               State& out) {
  const int n1 = p.game.rows(), n2 = p.game.cols();
  const double* x1 = x.data();
  const double* x2 = x.data() + n1;
  const Payoffs pay = ComputePayoffs(p.game, x1, x2);
  out.resize(n1 + n2);
  auto player_field = [&](const double* xi, const std::vector<double>& q,
                          double v, const MixedStrategy& c, int n,
                          double* f) {
    if (reg == RegularizerKind::kEntropy) {
      for (int a = 0; a < n; ++a) {
        f[a] = xi[a] * (q[a] - v) + p.mu * (c[a] - xi[a]);
      }
      return;
    }
    double mean = 0;
    for (int a = 0; a < n; ++a) {
      const double denom = std::max(xi[a], kProbabilityFloor);
      f[a] = q[a] + p.mu / denom * (c[a] - xi[a]);
      mean += f[a];
    }
    mean /= n;
    for (int a = 0; a < n; ++a) f[a] -= mean;
  };
  player_field(x1, pay.q1, pay.v1, p.c1, n1, out.data());
  player_field(x2, pay.q2, pay.v2, p.c2, n2, out.data() + n1);
}

ProfileField Split(const State& f, int n1) {
  return {std::vector<double>(f.begin(), f.begin() + n1),
          std::vector<double>(f.begin() + n1, f.end())};
}

// Clamps negatives and renormalizes each block. Returns false on NaN or an
// empty block.
bool Normalize(State& x, int n1) {
  auto block = [](double* b, int n) {
    double sum = 0;
    for (int a = 0; a < n; ++a) {
      if (!std::isfinite(b[a])) return false;
      if (b[a] < 0) b[a] = 0;
      sum += b[a];
    }
    if (!(sum > 0)) return false;
    for (int a = 0; a < n; ++a) b[a] /= sum;
    return true;
  };
  const int n2 = static_cast<int>(x.size()) - n1;
  return block(x.data(), n1) && block(x.data() + n1, n2);
}

StrategyProfile Unstack(const State& x, int n1) {
  return {MixedStrategy::FromWeights(State(x.begin(), x.begin() + n1)),
          MixedStrategy::FromWeights(State(x.begin() + n1, x.end()))};
}

class Rk4 {
 public:
  Rk4(const RmdParams& p, RegularizerKind reg)
      : p_(p), reg_(reg), n1_(p.game.rows()) {}

  // Advances x in place; returns false when the state becomes invalid.
  bool Step(State& x, double dt) {
    const std::size_t n = x.size();
    FieldInto(p_, reg_, x, k1_);
    tmp_.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
    FieldInto(p_, reg_, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
    FieldInto(p_, reg_, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
    FieldInto(p_, reg_, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    evaluations_ += 4;
    return Normalize(x, n1_);
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const RmdParams& p_;
  RegularizerKind reg_;
  int n1_;
  State k1_, k2_, k3_, k4_, tmp_;
  std::int64_t evaluations_ = 0;
};

double MaxAbs(const State& f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double ResidualAt(const RmdParams& p, const State& x) {
  State f;
  FieldInto(p, RegularizerKind::kEntropy, x, f);
  return MaxAbs(f);
}

// Stationarity equations plus one sum-to-one row per player.
Eigen::VectorXd Augmented(const RmdParams& p, const State& x) {
  const int n1 = p.game.rows(), n = static_cast<int>(x.size());
  State f;
  FieldInto(p, RegularizerKind::kEntropy, x, f);
  Eigen::VectorXd r(n + 2);
  for (int i = 0; i < n; ++i) r(i) = f[i];
  r(n) = std::accumulate(x.begin(), x.begin() + n1, 0.0) - 1.0;
  r(n + 1) = std::accumulate(x.begin() + n1, x.end(), 0.0) - 1.0;
  return r;
}

Eigen::MatrixXd JacobianOf(const RmdParams& p, const State& x) {
  const GameMatrix& g = p.game;
  const int n1 = g.rows(), n2 = g.cols(), n = n1 + n2;
  const double* x1 = x.data();
  const double* x2 = x.data() + n1;
  const Payoffs pay = ComputePayoffs(g, x1, x2);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n1; ++b) {
      j(a, b) = (a == b ? pay.q1[a] - pay.v1 - p.mu : 0.0) - x1[a] * pay.q1[b];
    }
    for (int b = 0; b < n2; ++b) {
      j(a, n1 + b) = x1[a] * (g.u1(a, b) + pay.q2[b]);
    }
  }
  for (int b = 0; b < n2; ++b) {
    for (int d = 0; d < n2; ++d) {
      j(n1 + b, n1 + d) =
          (b == d ? pay.q2[b] - pay.v2 - p.mu : 0.0) - x2[b] * pay.q2[d];
    }
    for (int a = 0; a < n1; ++a) {
      j(n1 + b, a) = x2[b] * (-g.u1(a, b) + pay.q1[a]);
    }
  }
  return j;
}

// Damped Newton on the augmented system. Returns true with x updated when
// the RMD residual reaches tol at an interior point; gives up once
// `evaluations` reaches `budget`.
bool NewtonPolish(const RmdParams& p, State& x, double tol,
                  std::int64_t budget, std::int64_t& evaluations) {
  const int n = static_cast<int>(x.size());
  const int n1 = p.game.rows();
  State cur = x;
  Eigen::VectorXd r = Augmented(p, cur);
  for (int iter = 0; iter < 50; ++iter) {
    ++evaluations;
    if (ResidualAt(p, cur) <= tol) {
      x = cur;
      return true;
    }
    Eigen::MatrixXd jac(n + 2, n);
    jac.topRows(n) = JacobianOf(p, cur);
    jac.row(n).setZero();
    jac.row(n + 1).setZero();
    jac.row(n).head(n1).setOnes();
    jac.row(n + 1).tail(n - n1).setOnes();
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
    evaluations += n + 1;
    if (!step.allFinite() || evaluations >= budget) return false;
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
      State trial = cur;
      bool interior = true;
      for (int i = 0; i < n; ++i) {
        trial[i] += alpha * step(i);
        if (!(trial[i] > 0)) interior = false;
      }
      if (!interior) continue;
      const Eigen::VectorXd r_trial = Augmented(p, trial);
      ++evaluations;
      if (r_trial.norm() < r.norm()) {
        cur = std::move(trial);
        r = r_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Rounding floor: renormalize once and accept if tolerance is met.
      if (!Normalize(cur, n1)) return false;
      if (ResidualAt(p, cur) <= tol) {
        x = cur;
        return true;
      }
      return false;
    }
  }
  if (!Normalize(cur, n1)) return false;
  if (ResidualAt(p, cur) <= tol) {
    x = cur;
    return true;
  }
  return false;
}

double SolverStep(const RmdParams& p) {
  return std::min(1.0, 0.5 / (2.0 * p.game.u_max() + p.mu));
}

}  // namespace

void RmdParams::Validate() const {
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mutation parameter mu must be positive");
  }
  if (c1.size() != game.rows() || c2.size() != game.cols()) {
    throw std::invalid_argument("reference strategies do not match the game");
  }
  if (!c1.IsInterior() || !c2.IsInterior()) {
    throw std::invalid_argument("reference strategies must be interior");
  }
}

RmdParams RmdParams::Uniform(GameMatrix game, double mu) {
  RmdParams p;
  p.c1 = MixedStrategy::Uniform(game.rows());
  p.c2 = MixedStrategy::Uniform(game.cols());
  p.game = std::move(game);
  p.mu = mu;
  return p;
}

ProfileField FlowField(const RmdParams& p, RegularizerKind reg,
                       const StrategyProfile& prof) {
  CheckProfile(p.game, prof);
  State f;
  FieldInto(p, reg, Stack(prof), f);
  return Split(f, p.game.rows());
}

ProfileField RmdField(const RmdParams& p, const StrategyProfile& prof) {
  return FlowField(p, RegularizerKind::kEntropy, prof);
}

double FieldMaxNorm(const ProfileField& f) {
  return std::max(MaxAbs(f.first), MaxAbs(f.second));
}

StrategyProfile Rk4Step(const RmdParams& p, RegularizerKind reg,
                        const StrategyProfile& prof, double dt) {
  CheckProfile(p.game, prof);
  State x = Stack(prof);
  Rk4 rk(p, reg);
  if (!rk.Step(x, dt)) {
    throw IntegrationError("RK4 step produced an invalid state", dt);
  }
  return Unstack(x, p.game.rows());
}

Trajectory IntegrateFlow(const RmdParams& p, RegularizerKind reg,
                         const StrategyProfile& start, double t_end, double dt,
                         int keep_every) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0)) throw std::invalid_argument("t_end must be >= 0");
  if (keep_every <= 0) throw std::invalid_argument("keep_every must be > 0");
  CheckProfile(p.game, start);
  const int n1 = p.game.rows();
  Trajectory out;
  out.push_back({0.0, start});
  const auto steps =
      static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
  State x = Stack(start);
  Rk4 rk(p, reg);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double h = k == steps ? t_end - t_prev : dt;
    if (!rk.Step(x, h)) {
      std::ostringstream msg;
      msg << "integration produced NaN or an empty block at t = " << t_prev;
      throw IntegrationError(msg.str(), t_prev);
    }
    if (k % keep_every == 0 || k == steps) {
      out.push_back({k == steps ? t_end : static_cast<double>(k) * dt,
                     Unstack(x, n1)});
    }
  }
  return out;
}

std::vector<double> RmdJacobian(const RmdParams& p,
                                const StrategyProfile& prof) {
  CheckProfile(p.game, prof);
  const Eigen::MatrixXd j = JacobianOf(p, Stack(prof));
  std::vector<double> out(j.size());
  for (int r = 0; r < j.rows(); ++r) {
    for (int c = 0; c < j.cols(); ++c) out[r * j.cols() + c] = j(r, c);
  }
  return out;
}

double StationaryXi(const RmdParams& p, const StrategyProfile& profile) {
  double xi = std::numeric_limits<double>::infinity();
  for (Player pl : {Player::kOne, Player::kTwo}) {
    const MixedStrategy& pi = profile.of(pl);
    const MixedStrategy& c = p.reference(pl);
    for (int a = 0; a < pi.size(); ++a) xi = std::min(xi, c[a] / pi[a]);
  }
  return xi;
}

StationaryPoint SolveStationary(const RmdParams& p, const SolveOptions& opts) {
  p.Validate();
  if (!(opts.tol > 0)) throw std::invalid_argument("tol must be positive");
  const int n1 = p.game.rows();
  State x;
  if (opts.start) {
    CheckProfile(p.game, *opts.start);
    if (!opts.start->IsInterior()) {
      throw std::invalid_argument("solver start must be interior");
    }
    x = Stack(*opts.start);
  } else {
    x = Stack({MixedStrategy::Uniform(n1),
               MixedStrategy::Uniform(p.game.cols())});
  }
  const double dt = SolverStep(p);
  Rk4 rk(p, RegularizerKind::kEntropy);
  std::int64_t newton_evaluations = 0;
  constexpr int kStepsBetweenPolish = 200;
  bool converged = false;
  while (true) {
    State trial = x;
    if (NewtonPolish(p, trial, opts.tol,
                     opts.max_field_evaluations - rk.evaluations(),
                     newton_evaluations)) {
      x = std::move(trial);
      converged = true;
      break;
    }
    if (rk.evaluations() + newton_evaluations >= opts.max_field_evaluations) {
      break;
    }
    for (int k = 0; k < kStepsBetweenPolish; ++k) {
      if (!rk.Step(x, dt)) {
        throw IntegrationError("stationary solver integration failed", 0.0);
      }
    }
    if (ResidualAt(p, x) <= opts.tol &&
        std::all_of(x.begin(), x.end(), [](double v) { return v > 0; })) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "stationary solver exceeded " << opts.max_field_evaluations
        << " field evaluations before reaching tol " << opts.tol
        << " (residual " << ResidualAt(p, x) << ")";
    throw ConvergenceError(msg.str());
  }
  StationaryPoint sp;
  sp.profile = Unstack(x, n1);
  sp.mu = p.mu;
  sp.residual = FieldMaxNorm(RmdField(p, sp.profile));
  sp.xi = StationaryXi(p, sp.profile);
  sp.c1 = p.c1;
  sp.c2 = p.c2;
  return sp;
}

double StationaryDivergenceRate(const RmdParams& p,
                                const StationaryPoint& sp,
                                const StrategyProfile& prof) {
  CheckProfile(p.game, prof);
  if (!prof.IsInterior()) {
    throw std::invalid_argument("divergence rate needs an interior profile");
  }
  double s = 0;
  for (Player pl : {Player::kOne, Player::kTwo}) {
    const MixedStrategy& pi = prof.of(pl);
    const MixedStrategy& pm = sp.profile.of(pl);
    const MixedStrategy& c = p.reference(pl);
    for (int a = 0; a < pi.size(); ++a) {
      const double d = std::sqrt(pi[a] / pm[a]) - std::sqrt(pm[a] / pi[a]);
      s += c[a] * d * d;
    }
  }
  return -p.mu * s;
}

double DivergenceRate(const RmdParams& p, const StrategyProfile& fixed,
                      const StrategyProfile& current) {
  CheckProfile(p.game, fixed);
  CheckProfile(p.game, current);
  double s = ExpectedValue(p.game, {current.p1, fixed.p2}, Player::kOne) +
             ExpectedValue(p.game, {fixed.p1, current.p2}, Player::kTwo) +
             2.0 * p.mu;
  for (Player pl : {Player::kOne, Player::kTwo}) {
    const MixedStrategy& pi = fixed.of(pl);
    const MixedStrategy& pt = current.of(pl);
    const MixedStrategy& c = p.reference(pl);
    for (int a = 0; a < pi.size(); ++a) s -= p.mu * c[a] * pi[a] / pt[a];
  }
  return s;
}

std::pair<double, double> DeviationValueIdentity(const RmdParams& p,
                                                 const StationaryPoint& sp,
                                                 const MixedStrategy& test,
                                                 Player player) {
  StrategyProfile deviated = sp.profile;
  deviated.of(player) = test;
  const double lhs = ExpectedValue(p.game, deviated, player);
  const MixedStrategy& pm = sp.profile.of(player);
  const MixedStrategy& c = p.reference(player);
  double weighted = 0;
  for (int a = 0; a < pm.size(); ++a) weighted += c[a] * test[a] / pm[a];
  const double rhs =
      ExpectedValue(p.game, sp.profile, player) + p.mu - p.mu * weighted;
  return {lhs, rhs};
}

double ExploitabilityBound(const StationaryPoint& sp, double kl0, double u_max,
                           double t) {
  if (kl0 < 0 || t < 0) {
    throw std::invalid_argument("bound needs kl0 >= 0 and t >= 0");
  }
  return 2.0 * sp.mu + 2.0 * u_max * std::sqrt(std::log(2.0) * kl0) *
                           std::exp(-0.5 * sp.mu * sp.xi * t);
}

KlDecayReport KlDecayCertificate(const RmdParams& p,
                                 const StrategyProfile& start, double horizon,
                                 double dt, double sample_every,
                                 double fit_floor) {
  if (!start.IsInterior()) {
    throw std::invalid_argument("KL decay certificate needs an interior start");
  }
  const StationaryPoint sp = SolveStationary(p, 1e-12);
  const int keep = std::max(1, static_cast<int>(std::lround(sample_every / dt)));
  const Trajectory traj = IntegrateRmd(p, start, horizon, dt, keep);
  KlDecayReport rep;
  rep.xi = StationaryXi(p, sp.profile);
  const double kl0 = ProfileKl(sp.profile, start);
  rep.bound_holds = true;
  // Absolute slack for KL values at the rounding floor.
  constexpr double kZeroKl = 1e-15;
  for (const TimedProfile& tp : traj) {
    const double kl = ProfileKl(sp.profile, tp.profile);
    const double bound = kl0 * std::exp(-p.mu * rep.xi * tp.time);
    rep.times.push_back(tp.time);
    rep.kl.push_back(kl);
    rep.bound.push_back(bound);
    if (bound > 0) rep.max_bound_ratio = std::max(rep.max_bound_ratio, kl / bound);
    if (kl > bound * (1.0 + 1e-6) + kZeroKl) rep.bound_holds = false;
  }
  // Least squares of ln kl on t.
  double st = 0, sy = 0, stt = 0, sty = 0;
  int m = 0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (!(rep.kl[i] > fit_floor)) continue;
    const double t = rep.times[i], y = std::log(rep.kl[i]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  rep.fitted_samples = m;
  if (m >= 2) {
    const double denom = m * stt - st * st;
    rep.fitted_slope = denom != 0 ? (m * sty - st * sy) / denom : 0.0;
  }
  return rep;
}

bool StationaryIs2MuNash(const GameMatrix& g, const StationaryPoint& sp) {
  return Exploitability(g, sp.profile) <= 2.0 * sp.mu + 2.0 * sp.residual;
}

}  // namespace mftrl
