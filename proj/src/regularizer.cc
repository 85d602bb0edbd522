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

#include "mftrl/regularizer.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace mftrl {
namespace {

void CheckFinite(std::span<const double> z) {
  for (double x : z) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("score vector has a non-finite entry");
    }
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

RegularizerKind ParseRegularizer(const std::string& name) {
  if (name == "entropy") return RegularizerKind::kEntropy;
  if (name == "euclidean") return RegularizerKind::kSquaredEuclidean;
  throw std::invalid_argument("unknown regularizer '" + name +
                              "' (expected entropy|euclidean)");
}

std::string RegularizerName(RegularizerKind kind) {
  return kind == RegularizerKind::kEntropy ? "entropy" : "euclidean";
}

ScoreVector::ScoreVector(std::vector<double> z) : z_(std::move(z)) {
  CheckFinite(z_);
}

void ScoreVector::AddScaled(std::span<const double> delta, double scale) {
  if (delta.size() != z_.size()) {
    throw std::invalid_argument("score update has the wrong dimension");
  }
  for (std::size_t a = 0; a < z_.size(); ++a) z_[a] += scale * delta[a];
  CheckFinite(z_);
}

double Psi(RegularizerKind kind, std::span<const double> p) {
  double s = 0;
  if (kind == RegularizerKind::kEntropy) {
    for (double x : p) {
      if (x > 0) s += x * std::log(x);
    }
  } else {
    for (double x : p) s += 0.5 * x * x;
  }
  return s;
}

std::vector<double> PsiGradient(RegularizerKind kind,
                                std::span<const double> p) {
  std::vector<double> g(p.begin(), p.end());
  if (kind == RegularizerKind::kEntropy) {
    for (double& x : g) {
      if (!(x > 0)) {
        throw std::invalid_argument("entropy gradient needs an interior point");
      }
      x = std::log(x) + 1.0;
    }
  }
  return g;
}

std::vector<double> Softmax(std::span<const double> z) {
  CheckFinite(z);
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    p[a] = std::exp(z[a] - m);
    sum += p[a];
  }
  for (double& x : p) x /= sum;
  return p;
}

double LogSumExp(std::span<const double> z) {
  CheckFinite(z);
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double x : z) sum += std::exp(x - m);
  return m + std::log(sum);
}

std::vector<double> ProjectOntoSimplex(std::span<const double> v) {
  CheckFinite(v);
  if (v.empty()) throw std::invalid_argument("projection of an empty vector");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0;
  double theta = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0) theta = candidate;
  }
  std::vector<double> p(v.size());
  for (std::size_t a = 0; a < v.size(); ++a) p[a] = std::max(v[a] - theta, 0.0);
  return p;
}

MixedStrategy MirrorArgmax(RegularizerKind kind, std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("empty score vector");
  if (kind == RegularizerKind::kEntropy) {
    return MixedStrategy::FromWeights(Softmax(z));
  }
  return MixedStrategy::FromWeights(ProjectOntoSimplex(z));
}

double ConjugateValue(RegularizerKind kind, std::span<const double> z) {
  if (kind == RegularizerKind::kEntropy) return LogSumExp(z);
  const MixedStrategy pi = MirrorArgmax(kind, z);
  return Dot(z, pi.probs()) - Psi(kind, pi.probs());
}

double Kl(const MixedStrategy& x, const MixedStrategy& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("KL between strategies of different sizes");
  }
  // Sum of y * (r ln r - r + 1) with r = x / y; every term is nonnegative and
  // the extra -x + y terms cancel over the simplex.
  double s = 0;
  for (int a = 0; a < x.size(); ++a) {
    if (x[a] == 0) {
      s += y[a];
      continue;
    }
    if (!(y[a] > 0)) {
      throw std::invalid_argument("KL(x, y) undefined: y(a) = 0 < x(a)");
    }
    const double eps = (x[a] - y[a]) / y[a];
    const double term = y[a] * ((1.0 + eps) * std::log1p(eps) - eps);
    s += std::max(term, 0.0);
  }
  return s;
}

double ProfileKl(const StrategyProfile& p, const StrategyProfile& q) {
  return Kl(p.p1, q.p1) + Kl(p.p2, q.p2);
}

double Bregman(RegularizerKind kind, const MixedStrategy& x,
               const MixedStrategy& y) {
  if (kind == RegularizerKind::kEntropy) return Kl(x, y);
  if (x.size() != y.size()) {
    throw std::invalid_argument("Bregman between strategies of different "
                                "sizes");
  }
  double s = 0;
  for (int a = 0; a < x.size(); ++a) {
    const double d = x[a] - y[a];
    s += 0.5 * d * d;
  }
  return s;
}

double ProfileBregman(RegularizerKind kind, const StrategyProfile& x,
                      const StrategyProfile& y) {
  return Bregman(kind, x.p1, y.p1) + Bregman(kind, x.p2, y.p2);
}

std::vector<double> InvertMirrorArgmax(RegularizerKind kind,
                                       const MixedStrategy& pi) {
  std::vector<double> z(pi.probs().begin(), pi.probs().end());
  if (kind == RegularizerKind::kEntropy) {
    for (double& x : z) {
      if (!(x > 0)) {
        throw std::invalid_argument("entropy learner needs an interior "
                                    "initial strategy");
      }
      x = std::log(x);
    }
  }
  return z;
}

}  // namespace mftrl
