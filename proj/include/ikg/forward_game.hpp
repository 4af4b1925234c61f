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

#ifndef IKG_FORWARD_GAME_HPP
#define IKG_FORWARD_GAME_HPP

#include <optional>
#include <random>
#include <vector>

#include "ikg/constraints.hpp"
#include "ikg/core_model.hpp"
#include "ikg/costs.hpp"
#include "ikg/dynamics.hpp"

namespace ikg {

struct NashConfig {
  int max_ibr_sweeps = 60;
  int max_inner_iters = 40;
  int max_polish_iters = 40;
  double ibr_tol = 1e-7;           // sweep-to-sweep change
  double stationarity_tol = 1e-6;  // inf-norm target per agent
  double primal_tol = 1e-8;
  double trust_radius = 0.5;       // nonlinear dynamics linearization step cap
  double init_swerve = 0.35;       // symmetric lateral offset seeding the IBR
  unsigned seed = 0;
};

// Which disjunct each (owner, other, time, group) block activates; one face
// per active block by convention.
struct ActiveSetChoice {
  // Indexed like family.blocks(); -1 when the block is inactive.
  std::vector<int> selected_face;
};

struct NashResult {
  Trajectory trajectory;
  KktCertificate certificate;
  ActiveSetChoice active;
  double stationarity_inf = 0.0;
  double primal_violation = 0.0;
  bool converged = false;
  int sweeps = 0;
};

class NashSolver {
 public:
  NashSolver(const ScenarioSpec& spec, VecX theta_star, NashConfig config = {});

  // Solves the coupled per-player problems to KKT stationarity.
  NashResult solve(std::optional<Trajectory> init = std::nullopt);

  // Equality-constrained best response of one agent with the others frozen.
  // Active inequality faces are handled by an active-set loop inside.
  Trajectory best_response(int agent, const Trajectory& frozen);

  const ConstraintFamily& family() const { return *family_; }

 private:
  friend struct NashPolish;
  const ScenarioSpec& spec_;
  VecX theta_star_;
  NashConfig cfg_;
  std::unique_ptr<ConstraintFamily> family_;
  std::vector<std::unique_ptr<ConstraintFamily>> known_;
  std::vector<VecX> known_theta_lifted_;
  VecX theta_lifted_;
};

// Equality structure of one agent: dynamics residual rows (t-major) followed
// by the agent's boundary pins. Shared by the game solver and KKT encoders.
int agent_equality_rows(const ScenarioSpec& spec, int agent);
VecX agent_equality_residual(const ScenarioSpec& spec, const Trajectory& traj, int agent);
// One sparse row per equality, gradients over the full flat layout.
std::vector<SparseVec> agent_equality_jacobian(const ScenarioSpec& spec, const Trajectory& traj,
                                               int agent);

// L1 and inf norms of the per-agent stationarity residuals of a certificate.
struct StationarityReport {
  std::vector<std::vector<double>> l1;    // [demo][agent]
  std::vector<std::vector<double>> linf;  // [demo][agent]
  double max_linf = 0.0;
  double total_l1 = 0.0;
};
StationarityReport kkt_residual(const ScenarioSpec& spec, const VecX& theta_natural,
                                const DemonstrationSet& demos, const KktCertificate& cert);

// Convenience wrapper: generates a certified demonstration set (one solve per
// start/goal arrangement given; single arrangement when none supplied).
DemonstrationSet generate_demos(const ScenarioSpec& spec, const VecX& theta_star, unsigned seed,
                                KktCertificate* cert_out = nullptr);

}  // namespace ikg

#endif  // IKG_FORWARD_GAME_HPP
