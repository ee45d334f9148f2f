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

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace cluster_teleport::protocols {

enum class CorrectionOp { Id, X, Z, XZ };

std::string to_string(CorrectionOp op);

struct GateApplied {
  std::string gate;
  std::vector<std::string> targets;
  bool operator==(const GateApplied&) const = default;
};

struct QubitPrepared {
  std::string party;
  std::string qubit;
  std::string state;
  bool operator==(const QubitPrepared&) const = default;
};

struct Measured {
  std::string party;
  std::string kind;  // bell | z | x | povm
  std::vector<std::string> targets;
  std::string outcome;
  double probability = 0.0;
  bool operator==(const Measured&) const = default;
};

struct ClassicalMessage {
  std::string from;
  std::string to;
  std::string payload;  // bit string, e.g. "01"
  bool operator==(const ClassicalMessage&) const = default;
};

struct CorrectionApplied {
  CorrectionOp op = CorrectionOp::Id;
  std::string target;
  bool operator==(const CorrectionApplied&) const = default;
};

using TranscriptEvent = std::variant<GateApplied, QubitPrepared, Measured, ClassicalMessage, CorrectionApplied>;

/// Ordered record of everything that happened in one protocol run.
class Transcript {
 public:
  template <typename Event>
  void record(Event event) {
    events_.emplace_back(std::move(event));
  }

  const std::vector<TranscriptEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool operator==(const Transcript&) const = default;

  /// Array of tagged records: {"type": "Measured", ...}.
  nlohmann::json to_json() const;
  /// One line per event, for terminal output.
  std::vector<std::string> to_lines() const;

 private:
  std::vector<TranscriptEvent> events_;
};

}  // namespace cluster_teleport::protocols
