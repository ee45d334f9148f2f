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

#include "cluster_teleport/transcript.hpp"

#include <sstream>

namespace cluster_teleport::protocols {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ",";
    out += item;
  }
  return out;
}

struct JsonVisitor {
  nlohmann::json operator()(const GateApplied& e) const {
    return {{"type", "GateApplied"}, {"gate", e.gate}, {"targets", e.targets}};
  }
  nlohmann::json operator()(const QubitPrepared& e) const {
    return {{"type", "QubitPrepared"}, {"party", e.party}, {"qubit", e.qubit}, {"state", e.state}};
  }
  nlohmann::json operator()(const Measured& e) const {
    return {{"type", "Measured"},    {"party", e.party},     {"kind", e.kind},
            {"targets", e.targets},  {"outcome", e.outcome}, {"probability", e.probability}};
  }
  nlohmann::json operator()(const ClassicalMessage& e) const {
    return {{"type", "ClassicalMessage"}, {"from", e.from}, {"to", e.to}, {"payload", e.payload}};
  }
  nlohmann::json operator()(const CorrectionApplied& e) const {
    return {{"type", "CorrectionApplied"}, {"op", to_string(e.op)}, {"target", e.target}};
  }
};

struct LineVisitor {
  std::string operator()(const GateApplied& e) const { return "gate " + e.gate + " on " + join(e.targets); }
  std::string operator()(const QubitPrepared& e) const {
    return e.party + " prepares " + e.qubit + " in |" + e.state + ">";
  }
  std::string operator()(const Measured& e) const {
    std::ostringstream os;
    os.precision(6);
    os << e.party << " measures " << join(e.targets) << " (" << e.kind << ") -> " << e.outcome << "  p=" << e.probability;
    return os.str();
  }
  std::string operator()(const ClassicalMessage& e) const { return e.from + " -> " + e.to + ": " + e.payload; }
  std::string operator()(const CorrectionApplied& e) const { return "correction " + to_string(e.op) + " on " + e.target; }
};

}  // namespace

std::string to_string(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::Id: return "I";
    case CorrectionOp::X: return "X";
    case CorrectionOp::Z: return "Z";
    case CorrectionOp::XZ: return "XZ";
  }
  return "?";
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& event : events_) out.push_back(std::visit(JsonVisitor{}, event));
  return out;
}

std::vector<std::string> Transcript::to_lines() const {
  std::vector<std::string> lines;
  lines.reserve(events_.size());
  for (const auto& event : events_) lines.push_back(std::visit(LineVisitor{}, event));
  return lines;
}

}  // namespace cluster_teleport::protocols
