/*
 Copyright 2026 the ikg authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef IKG_COSTS_HPP
#define IKG_COSTS_HPP

#include <string>
#include <vector>

#include "ikg/core_model.hpp"

namespace ikg {

// Registered cost kinds:
//   individual_smoothness   sum_t |p^i_{t+1} - p^i_t|^2
//   shared_smoothness       sum_j sum_t |p^j_{t+1} - p^j_t|^2
//   smoothness_plus_control shared smoothness + w_u sum |u|^2 + w_y sum p_y^2
//   weighted_shared         own/other smoothness mix with weight theta-bar
//   baseline_barrier        individual smoothness - w * sum_t log|p^i - p^j|^2
double cost_value(const ScenarioSpec& spec, int agent, const Trajectory& traj);

// Gradient of J^i with respect to the full flat trajectory. Stationarity and
// best-response only consume the coordinates of agent i's own slice.
VecX cost_gradient(const ScenarioSpec& spec, int agent, const Trajectory& traj);

// Flat indices of agent i's own states and controls, t-major, states first.
std::vector<int> agent_slice_indices(const ScenarioSpec& spec, int agent);

// Hessian of J^i restricted to agent i's own slice (dense, slice order).
MatX cost_hessian_own(const ScenarioSpec& spec, int agent, const Trajectory& traj);

// Splits grad J^i(xi) = g0 + mix_weight * g1 over the full flat layout; g1 is
// nonzero only for the weighted_shared kind. Used for joint cost-constraint
// inference where the mix weight is unknown.
void cost_gradient_decomposition(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                                 VecX& g0, VecX& g1);

// Log-barrier collision cost used by the planning baseline (2 agents).
double barrier_cost_value(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                          double barrier_weight);
VecX barrier_cost_gradient(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                           double barrier_weight);

}  // namespace ikg

#endif  // IKG_COSTS_HPP
