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

#ifndef IKG_DYNAMICS_HPP
#define IKG_DYNAMICS_HPP

#include <string>
#include <vector>

#include "ikg/core_model.hpp"
#include "ikg/types.hpp"

namespace ikg {

// Discrete-time dynamics under forward Euler at dt. Each model materializes
// as equality rows  x_{t+1} - x_t - dt*f(x_t, u_t) = 0  with analytic
// Jacobians used by both the game solver and the KKT encoders.
class DynamicsModel {
 public:
  DynamicsModel(std::string id, int position_dim, DynamicsParams params, double dt);

  const std::string& id() const { return id_; }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  double dt() const { return dt_; }

  // Continuous-time drift f(x, u).
  VecX drift(const VecX& x, const VecX& u) const;

  // x_next - x_t - dt * f(x_t, u_t); zero iff the transition is Euler-feasible.
  VecX step_residual(const VecX& x_t, const VecX& u_t, const VecX& x_next) const;

  struct Jacobians {
    MatX d_x;      // d residual / d x_t
    MatX d_u;      // d residual / d u_t
    MatX d_xnext;  // identity
  };
  Jacobians step_jacobians(const VecX& x_t, const VecX& u_t) const;

  // Rolls controls forward from x0; controls beyond T-1 steps are ignored.
  std::vector<VecX> unroll(const VecX& x0, const std::vector<VecX>& controls, int steps) const;

  // Builds a dynamically feasible straight-line trajectory between the
  // scenario's boundary pins (constant velocity, equilibrium actuation).
  static Trajectory straight_line_init(const ScenarioSpec& spec);

  static DynamicsModel for_agent(const ScenarioSpec& spec, int agent);

 private:
  std::string id_;
  int pd_;
  int state_dim_;
  int control_dim_;
  DynamicsParams params_;
  double dt_;
};

// Writes the controls of a trajectory as per-step vectors (inverse of unroll).
std::vector<VecX> extract_controls(const ScenarioSpec& spec, const Trajectory& traj, int agent);

// Max |step_residual| over all agents and transitions.
double dynamics_residual_inf(const ScenarioSpec& spec, const Trajectory& traj);

}  // namespace ikg

#endif  // IKG_DYNAMICS_HPP
