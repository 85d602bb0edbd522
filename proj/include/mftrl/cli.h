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


#ifndef MFTRL_CLI_H_
#define MFTRL_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mftrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitCertificateFailure = 2;

// Subcommands: simulate, stationary, sweep, verify. Usage and errors go to
// `err`; args excludes the program name.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int CliMain(int argc, char** argv);

}  // namespace mftrl

#endif  // MFTRL_CLI_H_
