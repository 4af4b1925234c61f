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

#include "ikg/costs.hpp"

#include <cmath>

namespace ikg {

namespace {

double smoothness_of_agent(const ScenarioSpec& spec, int j, const Trajectory& traj) {
  double s = 0.0;
  for (int t = 0; t + 1 < spec.horizon; ++t)
    s += (traj.position(spec, j, t + 1) - traj.position(spec, j, t)).squaredNorm();
  return s;
}

// Adds the gradient of sum_t |p^j_{t+1} - p^j_t|^2 w.r.t. agent j's positions.
void add_smoothness_grad(const ScenarioSpec& spec, int j, const Trajectory& traj, double w,
                         VecX& grad) {
  const int pd = spec.position_dim();
  for (int t = 0; t < spec.horizon; ++t) {
    VecX g = VecX::Zero(pd);
    if (t + 1 < spec.horizon) g -= 2.0 * (traj.position(spec, j, t + 1) - traj.position(spec, j, t));
    if (t > 0) g += 2.0 * (traj.position(spec, j, t) - traj.position(spec, j, t - 1));
    for (int c = 0; c < pd; ++c)
      grad[flat_index(spec, j, t, VarKind::state, c)] += w * g[c];
  }
}

double control_quad(const ScenarioSpec& spec, int j, const Trajectory& traj) {
  double s = 0.0;
  for (int t = 0; t < spec.horizon; ++t) s += traj.control_vec(spec, j, t).squaredNorm();
  return s;
}

void add_control_grad(const ScenarioSpec& spec, int j, const Trajectory& traj, double w,
                      VecX& grad) {
  for (int t = 0; t < spec.horizon; ++t) {
    VecX u = traj.control_vec(spec, j, t);
    for (int c = 0; c < u.size(); ++c)
      grad[flat_index(spec, j, t, VarKind::control, c)] += 2.0 * w * u[c];
  }
}

double y_quad(const ScenarioSpec& spec, int j, const Trajectory& traj) {
  double s = 0.0;
  for (int t = 0; t < spec.horizon; ++t) {
    const double y = traj.state(spec, j, t, 1);
    s += y * y;
  }
  return s;
}

void add_y_grad(const ScenarioSpec& spec, int j, const Trajectory& traj, double w, VecX& grad) {
  for (int t = 0; t < spec.horizon; ++t)
    grad[flat_index(spec, j, t, VarKind::state, 1)] += 2.0 * w * traj.state(spec, j, t, 1);
}

}  // namespace

double cost_value(const ScenarioSpec& spec, int agent, const Trajectory& traj) {
  const std::string& kind = spec.agents[agent].cost;
  const CostParams& cp = spec.cost_params[agent];
  if (kind == "individual_smoothness") return smoothness_of_agent(spec, agent, traj);
  if (kind == "shared_smoothness") {
    double s = 0.0;
    for (int j = 0; j < spec.num_agents(); ++j) s += smoothness_of_agent(spec, j, traj);
    return s;
  }
  if (kind == "smoothness_plus_control") {
    double s = 0.0;
    for (int j = 0; j < spec.num_agents(); ++j) {
      s += smoothness_of_agent(spec, j, traj) + cp.control_weight * control_quad(spec, j, traj);
      if (cp.y_weight != 0.0) s += cp.y_weight * y_quad(spec, j, traj);
    }
    return s;
  }
  if (kind == "weighted_shared") {
    double s = smoothness_of_agent(spec, 0, traj) +
               cp.mix_weight * smoothness_of_agent(spec, 1, traj);
    for (int j = 0; j < spec.num_agents(); ++j) s += cp.control_weight * control_quad(spec, j, traj);
    return s;
  }
  if (kind == "baseline_barrier")
    return barrier_cost_value(spec, agent, traj, cp.mix_weight);
  throw IkgError(IkgError::Kind::generic, "unknown cost kind: " + kind);
}

VecX cost_gradient(const ScenarioSpec& spec, int agent, const Trajectory& traj) {
  const std::string& kind = spec.agents[agent].cost;
  const CostParams& cp = spec.cost_params[agent];
  VecX grad = VecX::Zero(spec.traj_dim());
  if (kind == "individual_smoothness") {
    add_smoothness_grad(spec, agent, traj, 1.0, grad);
  } else if (kind == "shared_smoothness") {
    for (int j = 0; j < spec.num_agents(); ++j) add_smoothness_grad(spec, j, traj, 1.0, grad);
  } else if (kind == "smoothness_plus_control") {
    for (int j = 0; j < spec.num_agents(); ++j) {
      add_smoothness_grad(spec, j, traj, 1.0, grad);
      add_control_grad(spec, j, traj, cp.control_weight, grad);
      if (cp.y_weight != 0.0) add_y_grad(spec, j, traj, cp.y_weight, grad);
    }
  } else if (kind == "weighted_shared") {
    add_smoothness_grad(spec, 0, traj, 1.0, grad);
    add_smoothness_grad(spec, 1, traj, cp.mix_weight, grad);
    for (int j = 0; j < spec.num_agents(); ++j) add_control_grad(spec, j, traj, cp.control_weight, grad);
  } else if (kind == "baseline_barrier") {
    grad = barrier_cost_gradient(spec, agent, traj, cp.mix_weight);
  } else {
    throw IkgError(IkgError::Kind::generic, "unknown cost kind: " + kind);
  }
  return grad;
}

void cost_gradient_decomposition(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                                 VecX& g0, VecX& g1) {
  const std::string& kind = spec.agents[agent].cost;
  g0 = VecX::Zero(spec.traj_dim());
  g1 = VecX::Zero(spec.traj_dim());
  if (kind == "weighted_shared") {
    const CostParams& cp = spec.cost_params[agent];
    add_smoothness_grad(spec, 0, traj, 1.0, g0);
    add_smoothness_grad(spec, 1, traj, 1.0, g1);
    for (int j = 0; j < spec.num_agents(); ++j) add_control_grad(spec, j, traj, cp.control_weight, g0);
  } else {
    g0 = cost_gradient(spec, agent, traj);
  }
}

std::vector<int> agent_slice_indices(const ScenarioSpec& spec, int agent) {
  std::vector<int> idx;
  for (int t = 0; t < spec.horizon; ++t) {
    for (int c = 0; c < spec.agents[agent].state_dim; ++c)
      idx.push_back(flat_index(spec, agent, t, VarKind::state, c));
    for (int c = 0; c < spec.agents[agent].control_dim; ++c)
      idx.push_back(flat_index(spec, agent, t, VarKind::control, c));
  }
  return idx;
}

MatX cost_hessian_own(const ScenarioSpec& spec, int agent, const Trajectory& traj) {
  // Quadratic kinds have constant Hessians; the barrier kind is handled by
  // central differences on the gradient (it is only used by the baseline
  // planner where approximation quality is not safety-critical).
  const std::vector<int> slice = agent_slice_indices(spec, agent);
  const int d = static_cast<int>(slice.size());
  MatX H = MatX::Zero(d, d);
  const std::string& kind = spec.agents[agent].cost;
  if (kind == "baseline_barrier") {
    Trajectory work = traj;
    const double eps = 1e-6;
    for (int k = 0; k < d; ++k) {
      work.flat()[slice[k]] += eps;
      VecX gp = cost_gradient(spec, agent, work);
      work.flat()[slice[k]] -= 2 * eps;
      VecX gm = cost_gradient(spec, agent, work);
      work.flat()[slice[k]] += eps;
      for (int r = 0; r < d; ++r) H(r, k) = (gp[slice[r]] - gm[slice[r]]) / (2 * eps);
    }
    return 0.5 * (H + H.transpose());
  }
  // Assemble by differencing the (linear) gradient map once per column.
  Trajectory work = Trajectory::zeros(spec);
  VecX base = cost_gradient(spec, agent, work);
  for (int k = 0; k < d; ++k) {
    work.flat()[slice[k]] = 1.0;
    VecX g = cost_gradient(spec, agent, work);
    work.flat()[slice[k]] = 0.0;
    for (int r = 0; r < d; ++r) H(r, k) = g[slice[r]] - base[slice[r]];
  }
  return H;
}

double barrier_cost_value(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                          double barrier_weight) {
  const int other = 1 - agent;
  double s = smoothness_of_agent(spec, agent, traj);
  for (int t = 0; t < spec.horizon; ++t) {
    const double d2 = (traj.position(spec, agent, t) - traj.position(spec, other, t)).squaredNorm();
    s -= barrier_weight * std::log(std::max(d2, 1e-12));
  }
  return s;
}

VecX barrier_cost_gradient(const ScenarioSpec& spec, int agent, const Trajectory& traj,
                           double barrier_weight) {
  const int other = 1 - agent;
  const int pd = spec.position_dim();
  VecX grad = VecX::Zero(spec.traj_dim());
  add_smoothness_grad(spec, agent, traj, 1.0, grad);
  for (int t = 0; t < spec.horizon; ++t) {
    VecX diff = traj.position(spec, agent, t) - traj.position(spec, other, t);
    const double d2 = std::max(diff.squaredNorm(), 1e-12);
    for (int c = 0; c < pd; ++c)
      grad[flat_index(spec, agent, t, VarKind::state, c)] -= barrier_weight * 2.0 * diff[c] / d2;
  }
  return grad;
}

}  // namespace ikg
