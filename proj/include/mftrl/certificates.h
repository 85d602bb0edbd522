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

#ifndef MFTRL_CERTIFICATES_H_
#define MFTRL_CERTIFICATES_H_

#include <string>
#include <vector>

// Numerical certificates for the convergence results behind mutant FTRL,
// each run at desk scale on the built-in games.
//
//   theorem1    one discrete entropy M-FTRL step matches an Euler step of RMD
//               to second order in eta
//   theorem2    d/dt D(pi^mu, pi^t) equals the closed-form negative rate
//   corollary1  KL(pi^mu, pi^t) decays at least like exp(-mu xi t)
//   theorem3    exploitability of discrete M-FTRL stays under the bound
//   lemma1      d/dt D(pi, pi^t) for an arbitrary fixed profile pi
//   lemma2      deviation values against pi^mu
//   lemma3      D(pi, argmax(z)) = conj(z) - <z, pi> + psi(pi)
//   lemma4      rest points are interior, above mu min c / (2 u_max + mu)
//   uniqueness  multi-start agreement of the stationary solver

namespace mftrl {

struct CertificateResult {
  std::string name;
  bool pass = false;
  double observed = 0;
  double threshold = 0;
  std::string detail;
};

const std::vector<std::string>& CertificateNames();

// Throws std::invalid_argument for an unknown name.
CertificateResult RunCertificate(const std::string& name);

// `name,pass|fail,observed,threshold`.
std::string SummaryLine(const CertificateResult& r);

}  // namespace mftrl

#endif  // MFTRL_CERTIFICATES_H_
