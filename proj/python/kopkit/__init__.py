# Copyright 2026 The kopkit Authors
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

"""Kinematic orienteering: time-optimal legs, cost tensors and tour search."""

from kopkit._core import (
    AxisBoundary,
    Discretization,
    Instance,
    KinematicLimits,
    KopkitError,
    Location,
    PatternSolution,
    PoseState,
    Solution,
    axis_feasible_at,
    axis_time_optimal,
    candidate_times,
    cost_matrix,
    dubins_cost_matrix,
    evaluate,
    export_milp,
    is_feasible,
    leg_cost,
    load_instance,
    optimal_sync_time,
    parse_instance,
    sample_tour,
    solve_exact,
    solve_lns,
    turning_radius,
)

__all__ = [name for name in dir() if not name.startswith("_")]
