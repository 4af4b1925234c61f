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

#ifndef IKG_CORE_MODEL_HPP
#define IKG_CORE_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "ikg/types.hpp"

namespace ikg {

// Per-agent description inside a scenario.
struct AgentSpec {
  int state_dim = 0;
  int control_dim = 0;
  std::string dynamics;  // single_int | double_int | unicycle_v | quadcopter
  std::string cost;      // see costs.hpp for the registered kinds
};

struct CostParams {
  double control_weight = 1.0;  // weight on sum_t |u_t|^2 where the cost uses it
  double y_weight = 0.0;        // extra penalty weight on y positions
  double mix_weight = 1.0;      // weighted_shared: weight on agent 2's smoothness
};

// A constraint instance with frozen parameters (used for known constraints).
struct KnownConstraint {
  std::string kind;
  VecX theta;            // frozen natural parameters
  MatX face_normals;     // polytopic: one row per face (position space)
  bool shape_known = true;
  VecX shape;            // elliptic: frozen (theta2, theta3[, theta4])
};

// Descriptor of the theta-parameterized unknown constraint family.
struct UnknownFamilySpec {
  std::string kind;
  // Natural-parameter box bounds, one [lo, hi] pair per coordinate.
  std::vector<std::pair<double, double>> theta_bounds;
  MatX face_normals;    // polytopic_offset: known face normals
  bool shape_known = true;  // elliptic: theta2/theta3 frozen vs learned
  VecX shape;               // elliptic shape when known
};

struct BoundarySpec {
  std::vector<VecX> origins;              // \bar p_o^i
  std::vector<VecX> goals;                // \bar p_d^i
  std::optional<std::vector<VecX>> init_vel;
  std::optional<std::vector<VecX>> final_vel;
};

struct DynamicsParams {
  double mass = 1.0;
  double gravity = 9.81;
  double inertia_x = 1.0;
  double inertia_y = 1.0;
  double inertia_z = 1.0;
};

struct ScenarioSpec {
  int version = 1;
  std::string name;
  std::vector<AgentSpec> agents;
  std::vector<CostParams> cost_params;  // one per agent (defaulted if absent)
  int horizon = 0;  // T
  double dt = 0.0;
  std::vector<KnownConstraint> known_constraints;
  UnknownFamilySpec unknown_family;
  BoundarySpec boundary;
  DynamicsParams dynamics_params;

  // Filled lazily by scenario_content_hash(); content-derived, safe to copy.
  mutable std::string content_hash_cache;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int state_dim_total() const;
  int control_dim_total() const;
  int traj_dim() const { return (state_dim_total() + control_dim_total()) * horizon; }
  int position_dim() const;  // shared by all agents (2 or 3)
  // Half of the largest pairwise boundary-point spread; used to clamp
  // volume-extraction radii and to bound free trajectory variables.
  double workspace_diameter() const;
};

enum class VarKind { state, control };

// Canonical flat layout: time-major, states of all agents at time t precede
// controls of all agents at time t, agents ordered by index.
int flat_index(const ScenarioSpec& spec, int agent, int time, VarKind kind, int coord);

struct FlatCoord {
  int agent;
  int time;
  VarKind kind;
  int coord;
};
FlatCoord unflatten(const ScenarioSpec& spec, int flat);

struct Diagnostic {
  std::string field;
  std::string message;
};

// Structured invariant check; returns one diagnostic per violation, empty if ok.
std::vector<Diagnostic> validate_scenario(const ScenarioSpec& spec);

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const ScenarioSpec& spec, VecX flat);
  static Trajectory zeros(const ScenarioSpec& spec);

  const VecX& flat() const { return flat_; }
  VecX& flat() { return flat_; }
  const std::string& scenario_hash() const { return scenario_hash_; }

  double state(const ScenarioSpec& s, int agent, int t, int coord) const;
  double control(const ScenarioSpec& s, int agent, int t, int coord) const;
  VecX state_vec(const ScenarioSpec& s, int agent, int t) const;
  VecX control_vec(const ScenarioSpec& s, int agent, int t) const;
  // Position/velocity accessors use each dynamics model's state layout
  // (positions first, then velocities where present).
  VecX position(const ScenarioSpec& s, int agent, int t) const;
  VecX velocity(const ScenarioSpec& s, int agent, int t) const;

  void set_state(const ScenarioSpec& s, int agent, int t, const VecX& x);
  void set_control(const ScenarioSpec& s, int agent, int t, const VecX& u);

 private:
  VecX flat_;
  std::string scenario_hash_;
};

struct DemonstrationSet {
  std::string scenario_hash;
  std::vector<Trajectory> trajectories;
  std::vector<double> noise;  // optional per-demo annotation; empty if none

  int size() const { return static_cast<int>(trajectories.size()); }
};

// Lagrange multipliers for one demo and one agent.
struct AgentMultipliers {
  VecX nu;                    // equality duals, one per h row
  std::vector<double> lambda_known;    // per known active scalar constraint
  std::vector<double> lambda_unknown;  // per unknown scalar face (dense over faces)
};

struct KktCertificate {
  VecX theta;  // natural parameters
  // [demo][agent]
  std::vector<std::vector<AgentMultipliers>> multipliers;
  std::vector<std::vector<double>> stationarity_l1;    // per demo per agent
  std::vector<std::vector<double>> stationarity_linf;  // per demo per agent
};

// FNV-1a 64-bit content hash, hex encoded; used for scenario/demo digests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace ikg

#endif  // IKG_CORE_MODEL_HPP
