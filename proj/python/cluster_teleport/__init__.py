# Copyright 2026 The cluster-teleport Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Controlled probabilistic teleportation over a four-qubit cluster channel."""

import json

from ._core import (
    AssumptionViolation,
    BellOutcome,
    ChannelParams,
    InputState,
    InvariantError,
    TeleportResult,
    critique_density_matrix,
    failure_probability,
    figure2_data,
    geometric_success,
    make_povm,
    monte_carlo_repeat,
    proposed_teleport,
    ramirez_teleport,
    run_cli,
    success_probability,
    table1_outcome,
    table2_branch,
)


def transcript(result):
    """Transcript events of a TeleportResult as a list of dicts."""
    return json.loads(result.transcript_json)


__all__ = [
    "AssumptionViolation",
    "BellOutcome",
    "ChannelParams",
    "InputState",
    "InvariantError",
    "TeleportResult",
    "critique_density_matrix",
    "failure_probability",
    "figure2_data",
    "geometric_success",
    "make_povm",
    "monte_carlo_repeat",
    "proposed_teleport",
    "ramirez_teleport",
    "run_cli",
    "success_probability",
    "table1_outcome",
    "table2_branch",
    "transcript",
]
