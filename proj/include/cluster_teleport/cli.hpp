// Copyright 2026 The cluster-teleport Authors
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cluster_teleport/protocols.hpp"

namespace cluster_teleport::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitAssumption = 3,
};

enum class OutputFormat { Human, Json, Csv };

struct RunConfig {
  protocols::InputState zeta{0.6, 0.8};
  protocols::ChannelParams channel = protocols::ChannelParams::uniform();
  std::optional<double> rho;
  std::uint64_t seed = 1;
  std::int64_t trials = 100000;
  std::int64_t max_tries = 100;
  std::string protocol = "proposed";
  OutputFormat format = OutputFormat::Human;
  std::optional<std::string> out_path;
  std::vector<double> p_values;
  std::vector<std::int64_t> n_values;
};

/// Runs one `teleport` invocation. `args` excludes the program name.
/// Output is written to `out` (or the --out file) only after the command has
/// finished; diagnostics go to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a probability with 12 significant digits.
std::string format_probability(double value);

}  // namespace cluster_teleport::cli
