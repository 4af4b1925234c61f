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

#include "ikg/core_model.hpp"

#include <cmath>
#include <sstream>

#include "ikg/json_io.hpp"

namespace ikg {

int ScenarioSpec::state_dim_total() const {
  int n = 0;
  for (const auto& a : agents) n += a.state_dim;
  return n;
}

int ScenarioSpec::control_dim_total() const {
  int m = 0;
  for (const auto& a : agents) m += a.control_dim;
  return m;
}

int ScenarioSpec::position_dim() const {
  if (boundary.origins.empty()) return 2;
  return static_cast<int>(boundary.origins[0].size());
}

double ScenarioSpec::workspace_diameter() const {
  double d = 0.0;
  std::vector<VecX> pts;
  for (const auto& p : boundary.origins) pts.push_back(p);
  for (const auto& p : boundary.goals) pts.push_back(p);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      d = std::max(d, (pts[i] - pts[j]).lpNorm<Eigen::Infinity>());
  return d > 0.0 ? d : 1.0;
}

int flat_index(const ScenarioSpec& spec, int agent, int time, VarKind kind, int coord) {
  const int N = spec.num_agents();
  if (agent < 0 || agent >= N) throw IkgError(IkgError::Kind::generic, "flat_index: agent out of range");
  if (time < 0 || time >= spec.horizon) throw IkgError(IkgError::Kind::generic, "flat_index: time out of range");
  const int n = spec.state_dim_total();
  const int m = spec.control_dim_total();
  int off = time * (n + m);
  if (kind == VarKind::state) {
    if (coord < 0 || coord >= spec.agents[agent].state_dim)
      throw IkgError(IkgError::Kind::generic, "flat_index: state coord out of range");
    for (int i = 0; i < agent; ++i) off += spec.agents[i].state_dim;
    return off + coord;
  }
  if (coord < 0 || coord >= spec.agents[agent].control_dim)
    throw IkgError(IkgError::Kind::generic, "flat_index: control coord out of range");
  off += n;
  for (int i = 0; i < agent; ++i) off += spec.agents[i].control_dim;
  return off + coord;
}

FlatCoord unflatten(const ScenarioSpec& spec, int flat) {
  const int n = spec.state_dim_total();
  const int m = spec.control_dim_total();
  if (flat < 0 || flat >= (n + m) * spec.horizon)
    throw IkgError(IkgError::Kind::generic, "unflatten: index out of range");
  FlatCoord c{};
  c.time = flat / (n + m);
  int r = flat % (n + m);
  if (r < n) {
    c.kind = VarKind::state;
    for (int i = 0; i < spec.num_agents(); ++i) {
      if (r < spec.agents[i].state_dim) {
        c.agent = i;
        c.coord = r;
        return c;
      }
      r -= spec.agents[i].state_dim;
    }
  } else {
    r -= n;
    c.kind = VarKind::control;
    for (int i = 0; i < spec.num_agents(); ++i) {
      if (r < spec.agents[i].control_dim) {
        c.agent = i;
        c.coord = r;
        return c;
      }
      r -= spec.agents[i].control_dim;
    }
  }
  throw IkgError(IkgError::Kind::generic, "unflatten: corrupt layout");
}

std::vector<Diagnostic> validate_scenario(const ScenarioSpec& spec) {
  std::vector<Diagnostic> out;
  auto bad = [&out](const std::string& f, const std::string& m) { out.push_back({f, m}); };

  if (spec.num_agents() < 2) bad("agents", "need >= 2 agents");
  if (spec.horizon < 2) bad("horizon", "horizon must be >= 2");
  if (!(spec.dt > 0.0)) bad("dt", "dt must be > 0");
  for (int i = 0; i < spec.num_agents(); ++i) {
    if (spec.agents[i].state_dim <= 0)
      bad("agents[" + std::to_string(i) + "].state_dim", "must be positive");
    if (spec.agents[i].control_dim <= 0)
      bad("agents[" + std::to_string(i) + "].control_dim", "must be positive");
  }
  // All agents share one position dimensionality.
  if (!spec.boundary.origins.empty()) {
    const int pd = static_cast<int>(spec.boundary.origins[0].size());
    if (pd != 2 && pd != 3) bad("boundary.origins", "position dimension must be 2 or 3");
    for (size_t i = 0; i < spec.boundary.origins.size(); ++i)
      if (static_cast<int>(spec.boundary.origins[i].size()) != pd)
        bad("boundary.origins[" + std::to_string(i) + "]", "inconsistent position dimension");
    for (size_t i = 0; i < spec.boundary.goals.size(); ++i)
      if (static_cast<int>(spec.boundary.goals[i].size()) != pd)
        bad("boundary.goals[" + std::to_string(i) + "]", "inconsistent position dimension");
  }
  if (spec.boundary.origins.size() != spec.agents.size())
    bad("boundary.origins", "need one origin per agent");
  if (spec.boundary.goals.size() != spec.agents.size())
    bad("boundary.goals", "need one goal per agent");
  for (size_t c = 0; c < spec.unknown_family.theta_bounds.size(); ++c) {
    const auto& [lo, hi] = spec.unknown_family.theta_bounds[c];
    if (!std::isfinite(lo) || !std::isfinite(hi))
      bad("unknown_family.theta_bounds[" + std::to_string(c) + "]", "bounds must be finite");
    else if (lo > hi)
      bad("unknown_family.theta_bounds[" + std::to_string(c) + "]",
          "lower bound exceeds upper bound");
  }
  return out;
}

Trajectory::Trajectory(const ScenarioSpec& spec, VecX flat) : flat_(std::move(flat)) {
  if (flat_.size() != spec.traj_dim())
    throw IkgError(IkgError::Kind::generic, "Trajectory: flat length mismatch");
  scenario_hash_ = scenario_content_hash(spec);
}

Trajectory Trajectory::zeros(const ScenarioSpec& spec) {
  return Trajectory(spec, VecX::Zero(spec.traj_dim()));
}

double Trajectory::state(const ScenarioSpec& s, int agent, int t, int coord) const {
  return flat_[flat_index(s, agent, t, VarKind::state, coord)];
}
double Trajectory::control(const ScenarioSpec& s, int agent, int t, int coord) const {
  return flat_[flat_index(s, agent, t, VarKind::control, coord)];
}

VecX Trajectory::state_vec(const ScenarioSpec& s, int agent, int t) const {
  VecX x(s.agents[agent].state_dim);
  for (int c = 0; c < x.size(); ++c) x[c] = state(s, agent, t, c);
  return x;
}
VecX Trajectory::control_vec(const ScenarioSpec& s, int agent, int t) const {
  VecX u(s.agents[agent].control_dim);
  for (int c = 0; c < u.size(); ++c) u[c] = control(s, agent, t, c);
  return u;
}

VecX Trajectory::position(const ScenarioSpec& s, int agent, int t) const {
  const int pd = s.position_dim();
  VecX p(pd);
  for (int c = 0; c < pd; ++c) p[c] = state(s, agent, t, c);
  return p;
}

VecX Trajectory::velocity(const ScenarioSpec& s, int agent, int t) const {
  const int pd = s.position_dim();
  const std::string& dyn = s.agents[agent].dynamics;
  VecX v = VecX::Zero(pd);
  if (dyn == "double_int" || dyn == "unicycle_v") {
    for (int c = 0; c < pd; ++c) v[c] = state(s, agent, t, pd + c);
  } else if (dyn == "quadcopter") {
    for (int c = 0; c < pd; ++c) v[c] = state(s, agent, t, 6 + c);
  }
  // single_int carries no velocity in the state; returns zero.
  return v;
}

void Trajectory::set_state(const ScenarioSpec& s, int agent, int t, const VecX& x) {
  for (int c = 0; c < x.size(); ++c) flat_[flat_index(s, agent, t, VarKind::state, c)] = x[c];
}
void Trajectory::set_control(const ScenarioSpec& s, int agent, int t, const VecX& u) {
  for (int c = 0; c < u.size(); ++c) flat_[flat_index(s, agent, t, VarKind::control, c)] = u[c];
}

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace ikg
