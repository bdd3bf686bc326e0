// Copyright 2026 The kopkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `kopkit` command line: solve, dop, export-milp, cost-matrix, traj.

#ifndef KOPKIT_CLI_H_
#define KOPKIT_CLI_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kopkit/kinematics.h"

namespace kopkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;           // parse, I/O or validation
inline constexpr int kExitInfeasibleBudget = 2;
inline constexpr int kExitSearchSpace = 3;

// Parses `argv` and runs one subcommand. Summaries go to `out` as a single
// JSON line, diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

// "a:b:c" -> a, a+c, ... up to b inclusive.
std::vector<double> ParseSweep(const std::string& spec);

// CSV with header t,x,y,vx,vy,ax,ay and LF line endings.
void WriteTrajectoryCsv(std::span<const TrajectorySample> samples,
                        std::ostream& out);

}  // namespace kopkit

#endif  // KOPKIT_CLI_H_
