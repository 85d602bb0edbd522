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

#ifndef MFTRL_REGULARIZER_H_
#define MFTRL_REGULARIZER_H_

#include <span>
#include <string>
#include <vector>

#include "mftrl/game.h"

// Regularizers psi on the simplex, the regularized argmax
//   z -> argmax_{p in simplex} <z, p> - psi(p),
// its optimal value (the convex conjugate restricted to the simplex), and the
// associated Bregman divergences.
//
//   Entropy:          psi(p) = sum_a p(a) ln p(a)   (0 ln 0 = 0)
//   SquaredEuclidean: psi(p) = 1/2 ||p||^2

namespace mftrl {

enum class RegularizerKind { kEntropy, kSquaredEuclidean };

// "entropy" | "euclidean".
RegularizerKind ParseRegularizer(const std::string& name);
std::string RegularizerName(RegularizerKind kind);

// Cumulative score vector; entries are always finite.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<double> z);

  int size() const { return static_cast<int>(z_.size()); }
  double operator[](int a) const { return z_[a]; }
  std::span<const double> values() const { return z_; }

  // z += scale * delta.
  void AddScaled(std::span<const double> delta, double scale);

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<double> z_;
};

double Psi(RegularizerKind kind, std::span<const double> p);
// Requires p interior for Entropy.
std::vector<double> PsiGradient(RegularizerKind kind,
                                std::span<const double> p);

// Throws std::invalid_argument on non-finite z.
MixedStrategy MirrorArgmax(RegularizerKind kind, std::span<const double> z);
inline MixedStrategy MirrorArgmax(RegularizerKind kind, const ScoreVector& z) {
  return MirrorArgmax(kind, z.values());
}

// Max-subtracted softmax.
std::vector<double> Softmax(std::span<const double> z);
double LogSumExp(std::span<const double> z);
// Euclidean projection onto the simplex (sort and threshold).
std::vector<double> ProjectOntoSimplex(std::span<const double> v);

// max_{p in simplex} <z, p> - psi(p).
double ConjugateValue(RegularizerKind kind, std::span<const double> z);

// D(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>. For Entropy this is
// Kl(x, y) and throws when x puts mass where y has none.
double Bregman(RegularizerKind kind, const MixedStrategy& x,
               const MixedStrategy& y);
double ProfileBregman(RegularizerKind kind, const StrategyProfile& x,
                      const StrategyProfile& y);

double Kl(const MixedStrategy& x, const MixedStrategy& y);
double ProfileKl(const StrategyProfile& p, const StrategyProfile& q);

// Scores whose mirror argmax is pi: ln pi for Entropy (pi interior), pi
// itself for SquaredEuclidean.
std::vector<double> InvertMirrorArgmax(RegularizerKind kind,
                                       const MixedStrategy& pi);

}  // namespace mftrl

#endif  // MFTRL_REGULARIZER_H_
