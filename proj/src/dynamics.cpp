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

#include "ikg/dynamics.hpp"

#include <cmath>

namespace ikg {

namespace {

void check_finite(const VecX& v, const char* what) {
  for (int i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw IkgError(IkgError::Kind::generic, std::string("non-finite value in ") + what);
}

}  // namespace

DynamicsModel::DynamicsModel(std::string id, int position_dim, DynamicsParams params, double dt)
    : id_(std::move(id)), pd_(position_dim), params_(params), dt_(dt) {
  if (id_ == "single_int") {
    state_dim_ = pd_;
    control_dim_ = pd_;
  } else if (id_ == "double_int") {
    state_dim_ = 2 * pd_;
    control_dim_ = pd_;
  } else if (id_ == "unicycle_v") {
    state_dim_ = 4;  // (px, py, vx, vy)
    control_dim_ = 2;
  } else if (id_ == "quadcopter") {
    state_dim_ = 12;
    control_dim_ = 4;
  } else {
    throw IkgError(IkgError::Kind::generic, "unknown dynamics id: " + id_);
  }
}

DynamicsModel DynamicsModel::for_agent(const ScenarioSpec& spec, int agent) {
  DynamicsModel m(spec.agents[agent].dynamics, spec.position_dim(), spec.dynamics_params, spec.dt);
  if (m.state_dim() != spec.agents[agent].state_dim ||
      m.control_dim() != spec.agents[agent].control_dim)
    throw IkgError(IkgError::Kind::generic, "agent dims inconsistent with dynamics model");
  return m;
}

VecX DynamicsModel::drift(const VecX& x, const VecX& u) const {
  VecX f = VecX::Zero(state_dim_);
  if (id_ == "single_int") {
    f = u;
  } else if (id_ == "double_int") {
    f.head(pd_) = x.segment(pd_, pd_);
    f.tail(pd_) = u;
  } else if (id_ == "unicycle_v") {
    const double vx = x[2], vy = x[3];
    const double s = std::sqrt(vx * vx + vy * vy);
    f[0] = vx;
    f[1] = vy;
    if (s > 0.0) {
      f[2] = (-vy * u[0] + vx * u[1]) / s;
      f[3] = (vx * u[0] + vy * u[1]) / s;
    }
    // s == 0: zero-drift convention for the velocity rows.
  } else {  // quadcopter
    const double m = params_.mass, g = params_.gravity;
    const double Ix = params_.inertia_x, Iy = params_.inertia_y, Iz = params_.inertia_z;
    const double a = x[3], b = x[4], c = x[5];
    const double ad = x[9], bd = x[10], cd = x[11];
    const double F = u[0];
    f.segment(0, 3) = x.segment(6, 3);
    f.segment(3, 3) = x.segment(9, 3);
    f[6] = -(F / m) * (std::sin(a) * std::sin(c) + std::cos(a) * std::sin(b) * std::cos(c));
    f[7] = -(F / m) * (std::cos(a) * std::sin(c) - std::sin(a) * std::sin(b) * std::cos(c));
    f[8] = g - (F / m) * std::cos(b) * std::cos(c);
    f[9] = ((Iy - Iz) / Ix) * bd * cd + u[1] / Ix;
    f[10] = ((Iz - Ix) / Iy) * ad * cd + u[2] / Iy;
    f[11] = ((Ix - Iy) / Iz) * ad * bd + u[3] / Iz;
  }
  return f;
}

VecX DynamicsModel::step_residual(const VecX& x_t, const VecX& u_t, const VecX& x_next) const {
  check_finite(x_t, "state");
  check_finite(u_t, "control");
  check_finite(x_next, "next state");
  return x_next - x_t - dt_ * drift(x_t, u_t);
}

DynamicsModel::Jacobians DynamicsModel::step_jacobians(const VecX& x, const VecX& u) const {
  const int n = state_dim_, mdim = control_dim_;
  MatX fx = MatX::Zero(n, n), fu = MatX::Zero(n, mdim);
  if (id_ == "single_int") {
    fu = MatX::Identity(n, mdim);
  } else if (id_ == "double_int") {
    fx.block(0, pd_, pd_, pd_) = MatX::Identity(pd_, pd_);
    fu.block(pd_, 0, pd_, pd_) = MatX::Identity(pd_, pd_);
  } else if (id_ == "unicycle_v") {
    fx(0, 2) = 1.0;
    fx(1, 3) = 1.0;
    const double vx = x[2], vy = x[3];
    const double s2 = vx * vx + vy * vy;
    if (s2 > 0.0) {
      const double s = std::sqrt(s2), s3 = s * s2;
      // f2 = (-vy u0 + vx u1)/s, f3 = (vx u0 + vy u1)/s
      fx(2, 2) = u[1] / s - (-vy * u[0] + vx * u[1]) * vx / s3;
      fx(2, 3) = -u[0] / s - (-vy * u[0] + vx * u[1]) * vy / s3;
      fx(3, 2) = u[0] / s - (vx * u[0] + vy * u[1]) * vx / s3;
      fx(3, 3) = u[1] / s - (vx * u[0] + vy * u[1]) * vy / s3;
      fu(2, 0) = -vy / s;
      fu(2, 1) = vx / s;
      fu(3, 0) = vx / s;
      fu(3, 1) = vy / s;
    }
  } else {  // quadcopter
    const double m = params_.mass;
    const double Ix = params_.inertia_x, Iy = params_.inertia_y, Iz = params_.inertia_z;
    const double a = x[3], b = x[4], c = x[5];
    const double ad = x[9], bd = x[10], cd = x[11];
    const double F = u[0];
    const double sa = std::sin(a), ca = std::cos(a);
    const double sb = std::sin(b), cb = std::cos(b);
    const double sc = std::sin(c), cc = std::cos(c);
    fx.block(0, 6, 3, 3) = MatX::Identity(3, 3);
    fx.block(3, 9, 3, 3) = MatX::Identity(3, 3);
    fx(6, 3) = -(F / m) * (ca * sc - sa * sb * cc);
    fx(6, 4) = -(F / m) * (ca * cb * cc);
    fx(6, 5) = -(F / m) * (sa * cc - ca * sb * sc);
    fx(7, 3) = -(F / m) * (-sa * sc - ca * sb * cc);
    fx(7, 4) = (F / m) * (sa * cb * cc);
    fx(7, 5) = -(F / m) * (ca * cc + sa * sb * sc);
    fx(8, 4) = (F / m) * sb * cc;
    fx(8, 5) = (F / m) * cb * sc;
    fx(9, 10) = ((Iy - Iz) / Ix) * cd;
    fx(9, 11) = ((Iy - Iz) / Ix) * bd;
    fx(10, 9) = ((Iz - Ix) / Iy) * cd;
    fx(10, 11) = ((Iz - Ix) / Iy) * ad;
    fx(11, 9) = ((Ix - Iy) / Iz) * bd;
    fx(11, 10) = ((Ix - Iy) / Iz) * ad;
    fu(6, 0) = -(sa * sc + ca * sb * cc) / m;
    fu(7, 0) = -(ca * sc - sa * sb * cc) / m;
    fu(8, 0) = -cb * cc / m;
    fu(9, 1) = 1.0 / Ix;
    fu(10, 2) = 1.0 / Iy;
    fu(11, 3) = 1.0 / Iz;
  }
  Jacobians j;
  j.d_x = -MatX::Identity(n, n) - dt_ * fx;
  j.d_u = -dt_ * fu;
  j.d_xnext = MatX::Identity(n, n);
  return j;
}

std::vector<VecX> DynamicsModel::unroll(const VecX& x0, const std::vector<VecX>& controls,
                                        int steps) const {
  std::vector<VecX> xs;
  xs.push_back(x0);
  for (int t = 0; t + 1 < steps; ++t) {
    const VecX& u = controls[t];
    VecX next = xs.back() + dt_ * drift(xs.back(), u);
    for (int i = 0; i < next.size(); ++i)
      if (!std::isfinite(next[i]))
        throw IkgError(IkgError::Kind::generic,
                       "unroll: non-finite state at step " + std::to_string(t + 1));
    xs.push_back(next);
  }
  return xs;
}

Trajectory DynamicsModel::straight_line_init(const ScenarioSpec& spec) {
  Trajectory traj = Trajectory::zeros(spec);
  const int T = spec.horizon;
  const int pd = spec.position_dim();
  for (int i = 0; i < spec.num_agents(); ++i) {
    const auto& dyn = spec.agents[i].dynamics;
    const VecX& p0 = spec.boundary.origins[i];
    const VecX& pT = spec.boundary.goals[i];
    const VecX vel = (pT - p0) / (spec.dt * (T - 1));
    for (int t = 0; t < T; ++t) {
      VecX x = VecX::Zero(spec.agents[i].state_dim);
      const double s = static_cast<double>(t) / (T - 1);
      x.head(pd) = p0 + s * (pT - p0);
      if (dyn == "double_int" || dyn == "unicycle_v") {
        x.segment(pd, pd) = vel;
      } else if (dyn == "quadcopter") {
        x.segment(6, 3) = vel;
      }
      traj.set_state(spec, i, t, x);
      VecX u = VecX::Zero(spec.agents[i].control_dim);
      if (dyn == "single_int" && t + 1 < T) u = vel;
      if (dyn == "quadcopter") u[0] = spec.dynamics_params.mass * spec.dynamics_params.gravity;
      traj.set_control(spec, i, t, u);
    }
  }
  return traj;
}

std::vector<VecX> extract_controls(const ScenarioSpec& spec, const Trajectory& traj, int agent) {
  std::vector<VecX> us;
  for (int t = 0; t < spec.horizon; ++t) us.push_back(traj.control_vec(spec, agent, t));
  return us;
}

double dynamics_residual_inf(const ScenarioSpec& spec, const Trajectory& traj) {
  double worst = 0.0;
  for (int i = 0; i < spec.num_agents(); ++i) {
    DynamicsModel model = DynamicsModel::for_agent(spec, i);
    for (int t = 0; t + 1 < spec.horizon; ++t) {
      VecX r = model.step_residual(traj.state_vec(spec, i, t), traj.control_vec(spec, i, t),
                                   traj.state_vec(spec, i, t + 1));
      worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace ikg
