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

#include "ikg/forward_game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ikg/json_io.hpp"

namespace ikg {

namespace {

// Last-timestep controls never enter the Euler map; the solver pins them to
// zero so the per-agent KKT systems stay nonsingular.
std::vector<int> last_control_indices(const ScenarioSpec& spec, int agent) {
  std::vector<int> idx;
  for (int c = 0; c < spec.agents[agent].control_dim; ++c)
    idx.push_back(flat_index(spec, agent, spec.horizon - 1, VarKind::control, c));
  return idx;
}

// Lateral bump applied to the straight-line interpolation; symmetric across
// agents so symmetric scenarios keep their equivariance.
Trajectory bent_init(const ScenarioSpec& spec, double swerve) {
  Trajectory traj = DynamicsModel::straight_line_init(spec);
  const int T = spec.horizon;
  const int pd = spec.position_dim();
  for (int i = 0; i < spec.num_agents(); ++i) {
    VecX dir = spec.boundary.goals[i] - spec.boundary.origins[i];
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    VecX perp = VecX::Zero(pd);
    if (pd == 2) {
      perp << -dir[1], dir[0];
    } else {
      perp << -dir[1], dir[0], 0.0;
      if (perp.norm() < 1e-6) perp << 1.0, 0.0, 0.0;
      perp.normalize();
    }
    const bool has_vel_pins = spec.boundary.init_vel || spec.boundary.final_vel;
    for (int t = 0; t < T; ++t) {
      VecX x = traj.state_vec(spec, i, t);
      const double s = std::sin(M_PI * t / (T - 1));
      x.head(pd) += swerve * s * perp;
      traj.set_state(spec, i, t, x);
    }
    // Keep velocities consistent with the bent positions where the state
    // carries them, except when the scenario pins boundary velocities.
    const std::string& dyn = spec.agents[i].dynamics;
    if (dyn == "double_int" || dyn == "unicycle_v" || dyn == "quadcopter") {
      const int off = velocity_state_offset(spec, i);
      for (int t = 0; t < T; ++t) {
        VecX x = traj.state_vec(spec, i, t);
        if (t + 1 < T) {
          VecX pnow = x.head(pd);
          VecX pnext = traj.state_vec(spec, i, t + 1).head(pd);
          x.segment(off, pd) = (pnext - pnow) / spec.dt;
        } else {
          x.segment(off, pd) = traj.state_vec(spec, i, t - 1).segment(off, pd);
        }
        if (has_vel_pins) {
          if (t == 0 && spec.boundary.init_vel) x.segment(off, pd) = (*spec.boundary.init_vel)[i];
          if (t == T - 1 && spec.boundary.final_vel)
            x.segment(off, pd) = (*spec.boundary.final_vel)[i];
        }
        traj.set_state(spec, i, t, x);
      }
      if (dyn == "double_int") {
        for (int t = 0; t + 1 < T; ++t) {
          VecX v_now = traj.state_vec(spec, i, t).segment(off, pd);
          VecX v_next = traj.state_vec(spec, i, t + 1).segment(off, pd);
          traj.set_control(spec, i, t, (v_next - v_now) / spec.dt);
        }
      }
      if (dyn == "single_int") {
        // handled below
      }
    }
    if (dyn == "single_int") {
      for (int t = 0; t + 1 < T; ++t) {
        VecX pnow = traj.state_vec(spec, i, t).head(pd);
        VecX pnext = traj.state_vec(spec, i, t + 1).head(pd);
        traj.set_control(spec, i, t, (pnext - pnow) / spec.dt);
      }
    }
  }
  return traj;
}

struct FaceKey {
  int block_idx;  // index into family.blocks() (known families offset)
  int face;
  bool known;
  int known_idx;  // which known constraint
  bool operator<(const FaceKey& o) const {
    return std::tie(known, known_idx, block_idx, face) <
           std::tie(o.known, o.known_idx, o.block_idx, o.face);
  }
};

}  // namespace

int agent_equality_rows(const ScenarioSpec& spec, int agent) {
  int rows = (spec.horizon - 1) * spec.agents[agent].state_dim;
  const int pd = spec.position_dim();
  rows += 2 * pd;  // origin + goal pins
  if (spec.boundary.init_vel) rows += pd;
  if (spec.boundary.final_vel) rows += pd;
  return rows;
}

VecX agent_equality_residual(const ScenarioSpec& spec, const Trajectory& traj, int agent) {
  DynamicsModel model = DynamicsModel::for_agent(spec, agent);
  VecX res(agent_equality_rows(spec, agent));
  int r = 0;
  for (int t = 0; t + 1 < spec.horizon; ++t) {
    VecX step = model.step_residual(traj.state_vec(spec, agent, t),
                                    traj.control_vec(spec, agent, t),
                                    traj.state_vec(spec, agent, t + 1));
    res.segment(r, step.size()) = step;
    r += static_cast<int>(step.size());
  }
  for (const auto& pin : boundary_constraints(spec)) {
    if (pin.agent != agent) continue;
    res[r++] = traj.flat()[pin_flat_index(spec, pin)] - pin.value;
  }
  return res;
}

std::vector<SparseVec> agent_equality_jacobian(const ScenarioSpec& spec, const Trajectory& traj,
                                               int agent) {
  DynamicsModel model = DynamicsModel::for_agent(spec, agent);
  std::vector<SparseVec> rows;
  const int n = spec.agents[agent].state_dim;
  const int m = spec.agents[agent].control_dim;
  for (int t = 0; t + 1 < spec.horizon; ++t) {
    auto jac = model.step_jacobians(traj.state_vec(spec, agent, t), traj.control_vec(spec, agent, t));
    for (int rr = 0; rr < n; ++rr) {
      SparseVec row;
      for (int c = 0; c < n; ++c) {
        row.add(flat_index(spec, agent, t, VarKind::state, c), jac.d_x(rr, c));
        row.add(flat_index(spec, agent, t + 1, VarKind::state, c), jac.d_xnext(rr, c));
      }
      for (int c = 0; c < m; ++c)
        row.add(flat_index(spec, agent, t, VarKind::control, c), jac.d_u(rr, c));
      rows.push_back(std::move(row));
    }
  }
  for (const auto& pin : boundary_constraints(spec)) {
    if (pin.agent != agent) continue;
    SparseVec row;
    row.add(pin_flat_index(spec, pin), 1.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

NashSolver::NashSolver(const ScenarioSpec& spec, VecX theta_star, NashConfig config)
    : spec_(spec), theta_star_(std::move(theta_star)), cfg_(config) {
  auto diags = validate_scenario(spec_);
  if (!diags.empty())
    throw IkgError(IkgError::Kind::generic, "invalid scenario: " + diags[0].field + ": " +
                                                diags[0].message);
  family_ = make_family(spec_);
  if (!family_->theta_in_bounds(theta_star_))
    throw IkgError(IkgError::Kind::generic, "theta_star outside the family's bounds");
  theta_lifted_ = family_->lift(theta_star_);
  for (const auto& k : spec_.known_constraints) {
    known_.push_back(make_known_family(spec_, k));
    known_theta_lifted_.push_back(known_.back()->lift(k.theta));
  }
}

Trajectory NashSolver::best_response(int agent, const Trajectory& frozen) {
  Trajectory work = frozen;
  const std::vector<int> slice = agent_slice_indices(spec_, agent);
  const int S = static_cast<int>(slice.size());
  std::vector<int> slice_pos(spec_.traj_dim(), -1);
  for (int k = 0; k < S; ++k) slice_pos[slice[k]] = k;
  const std::vector<int> upin = last_control_indices(spec_, agent);

  // Active set over this agent's blocks: block index -> face.
  std::map<int, int> active;
  struct OwnFace {
    int block_idx;
    int face;
    bool known;
    int known_idx;
  };
  auto family_of = [&](const OwnFace& f) -> const ConstraintFamily& {
    return f.known ? *known_[f.known_idx] : *family_;
  };
  auto theta_of = [&](const OwnFace& f) -> const VecX& {
    return f.known ? known_theta_lifted_[f.known_idx] : theta_lifted_;
  };

  // Enumerate this agent's blocks across unknown + known families.
  std::vector<std::pair<bool, int>> fam_list;  // (known?, idx)
  fam_list.emplace_back(false, -1);
  for (size_t k = 0; k < known_.size(); ++k) fam_list.emplace_back(true, static_cast<int>(k));

  const bool nonlinear_dyn = spec_.agents[agent].dynamics == "unicycle_v" ||
                             spec_.agents[agent].dynamics == "quadcopter";
  std::map<std::pair<int, std::pair<int, int>>, int> active_faces;  // (fam, (block, face)) -> 1

  MatX H = cost_hessian_own(spec_, agent, work);
  for (int iter = 0; iter < cfg_.max_inner_iters; ++iter) {
    if (spec_.agents[agent].cost == "baseline_barrier") H = cost_hessian_own(spec_, agent, work);
    // Assemble equality rows: dynamics + pins + last-control pins + active faces.
    std::vector<SparseVec> eq_rows = agent_equality_jacobian(spec_, work, agent);
    VecX eq_res = agent_equality_residual(spec_, work, agent);
    std::vector<SparseVec> rows = std::move(eq_rows);
    std::vector<double> res(eq_res.data(), eq_res.data() + eq_res.size());
    for (int ui : upin) {
      SparseVec r;
      r.add(ui, 1.0);
      rows.push_back(r);
      res.push_back(work.flat()[ui]);
    }
    const int first_face_row = static_cast<int>(rows.size());
    std::vector<std::pair<int, std::pair<int, int>>> face_keys;
    for (const auto& [key, on] : active_faces) {
      (void)on;
      const int fam = key.first;
      const auto& [b, f] = key.second;
      const ConstraintFamily& cf = fam < 0 ? *family_ : *known_[fam];
      const VecX& th = fam < 0 ? theta_lifted_ : known_theta_lifted_[fam];
      FaceAffine fa = cf.face_affine(work.flat(), cf.blocks()[b], f);
      rows.push_back(fa.grad(th));
      res.push_back(fa.value(th));
      face_keys.push_back(key);
    }

    const int R = static_cast<int>(rows.size());
    MatX kkt = MatX::Zero(S + R, S + R);
    VecX rhs = VecX::Zero(S + R);
    kkt.topLeftCorner(S, S) = H;
    VecX grad = cost_gradient(spec_, agent, work);
    for (int k = 0; k < S; ++k) rhs[k] = -grad[slice[k]];
    for (int r = 0; r < R; ++r) {
      for (const auto& [j, v] : rows[r].entries) {
        const int k = slice_pos[j];
        if (k < 0) continue;  // frozen opponent coordinate
        kkt(S + r, k) = v;
        kkt(k, S + r) = v;
      }
      rhs[S + r] = -res[r];
    }
    Eigen::FullPivLU<MatX> lu(kkt);
    if (!lu.isInvertible()) {
      // Degenerate active set: drop the most recently added face and retry.
      if (!active_faces.empty()) {
        active_faces.erase(std::prev(active_faces.end()));
        continue;
      }
      throw IkgError(IkgError::Kind::generic, "best_response: singular KKT system");
    }
    VecX sol = lu.solve(rhs);
    VecX delta = sol.head(S);
    double alpha = 1.0;
    const double dinf = delta.lpNorm<Eigen::Infinity>();
    if ((nonlinear_dyn || spec_.agents[agent].cost == "baseline_barrier") &&
        dinf > cfg_.trust_radius)
      alpha = cfg_.trust_radius / dinf;
    for (int k = 0; k < S; ++k) work.flat()[slice[k]] += alpha * delta[k];

    if (alpha < 1.0 || dinf > 1e-9) continue;  // keep iterating to a stationary point

    // Multiplier signs: drop faces with negative duals.
    int drop = -1;
    double most_negative = -1e-7;
    for (size_t f = 0; f < face_keys.size(); ++f) {
      const double lam = sol[S + first_face_row + static_cast<int>(f)];
      if (lam < most_negative) {
        most_negative = lam;
        drop = static_cast<int>(f);
      }
    }
    if (drop >= 0) {
      active_faces.erase(face_keys[drop]);
      continue;
    }
    // Violations: activate the nearest face of the most violated block.
    bool added = false;
    double worst = 1e-9;
    std::pair<int, std::pair<int, int>> worst_key;
    for (const auto& [known, kidx] : fam_list) {
      const ConstraintFamily& cf = known ? *known_[kidx] : *family_;
      const VecX& th = known ? known_theta_lifted_[kidx] : theta_lifted_;
      const auto& blocks = cf.blocks();
      for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].owner != agent) continue;
        double block_min = 1e100;
        int best_face = 0;
        for (int f = 0; f < blocks[b].n_faces; ++f) {
          const double v = cf.face_affine(work.flat(), blocks[b], f).value(th);
          if (v < block_min) {
            block_min = v;
            best_face = f;
          }
        }
        const int fam = known ? kidx : -1;
        if (block_min > worst && !active_faces.count({fam, {static_cast<int>(b), best_face}})) {
          worst = block_min;
          worst_key = {fam, {static_cast<int>(b), best_face}};
          added = true;
        }
      }
    }
    if (added) {
      active_faces[worst_key] = 1;
      continue;
    }
    break;  // stationary, dual feasible, primal feasible
  }
  return work;
}

// ---------------------------------------------------------------------------
// Joint polish: Newton on the stacked KKT system with a fixed active set.
// ---------------------------------------------------------------------------

struct NashPolish {
  const NashSolver& solver;
  const ScenarioSpec& spec;
  const ConstraintFamily& fam;
  // Active faces: (family ptr, lifted theta, block index, face).
  struct Face {
    const ConstraintFamily* cf;
    const VecX* theta;
    int block;
    int face;
    bool known;
    int known_idx;
  };
  std::vector<Face> faces;
  std::vector<int> free_coords;          // flat coords except last controls
  std::vector<int> coord_pos;            // flat -> position in free_coords
  std::vector<int> nu_offset;            // per agent into dual vector
  int n_free = 0, n_nu = 0;

  explicit NashPolish(const NashSolver& s) : solver(s), spec(s.spec_), fam(*s.family_) {
    std::vector<uint8_t> pinned(spec.traj_dim(), 0);
    for (int i = 0; i < spec.num_agents(); ++i)
      for (int c : last_control_indices(spec, i)) pinned[c] = 1;
    coord_pos.assign(spec.traj_dim(), -1);
    for (int j = 0; j < spec.traj_dim(); ++j)
      if (!pinned[j]) {
        coord_pos[j] = static_cast<int>(free_coords.size());
        free_coords.push_back(j);
      }
    n_free = static_cast<int>(free_coords.size());
    nu_offset.resize(spec.num_agents() + 1);
    nu_offset[0] = 0;
    for (int i = 0; i < spec.num_agents(); ++i)
      nu_offset[i + 1] = nu_offset[i] + agent_equality_rows(spec, i);
    n_nu = nu_offset.back();
  }

  int dim() const { return n_free + n_nu + static_cast<int>(faces.size()); }

  VecX residual(const VecX& w, const Trajectory& base) const {
    Trajectory traj = base;
    for (int k = 0; k < n_free; ++k) traj.flat()[free_coords[k]] = w[k];
    VecX F = VecX::Zero(dim());
    // Stationarity per agent over its free slice coords.
    for (int i = 0; i < spec.num_agents(); ++i) {
      VecX stat = cost_gradient(spec, i, traj);
      auto jac = agent_equality_jacobian(spec, traj, i);
      for (size_t r = 0; r < jac.size(); ++r)
        jac[r].scatter_into(stat, w[n_free + nu_offset[i] + static_cast<int>(r)]);
      for (size_t f = 0; f < faces.size(); ++f) {
        const Face& fc = faces[f];
        if (fc.cf->blocks()[fc.block].owner != i) continue;
        FaceAffine fa = fc.cf->face_affine(traj.flat(), fc.cf->blocks()[fc.block], fc.face);
        fa.grad(*fc.theta).scatter_into(stat, w[n_free + n_nu + static_cast<int>(f)]);
      }
      for (int c : agent_slice_indices(spec, i)) {
        const int k = coord_pos[c];
        if (k >= 0) F[k] = stat[c];
      }
    }
    // Equality feasibility.
    for (int i = 0; i < spec.num_agents(); ++i) {
      VecX h = agent_equality_residual(spec, traj, i);
      F.segment(n_free + nu_offset[i], h.size()) = h;
    }
    // Active faces at equality.
    for (size_t f = 0; f < faces.size(); ++f) {
      const Face& fc = faces[f];
      FaceAffine fa = fc.cf->face_affine(traj.flat(), fc.cf->blocks()[fc.block], fc.face);
      F[n_free + n_nu + static_cast<int>(f)] = fa.value(*fc.theta);
    }
    return F;
  }

  // Central-difference Jacobian over the trajectory coordinates; dual columns
  // are exact since the residual is linear in the multipliers.
  MatX jacobian(const VecX& w, const Trajectory& base) const {
    const int D = dim();
    MatX J = MatX::Zero(D, D);
    VecX wp = w;
    for (int k = 0; k < n_free; ++k) {
      const double eps = 1e-6 * std::max(1.0, std::abs(w[k]));
      wp[k] = w[k] + eps;
      VecX fp = residual(wp, base);
      wp[k] = w[k] - eps;
      VecX fm = residual(wp, base);
      wp[k] = w[k];
      J.col(k) = (fp - fm) / (2 * eps);
    }
    Trajectory traj = base;
    for (int k = 0; k < n_free; ++k) traj.flat()[free_coords[k]] = w[k];
    for (int i = 0; i < spec.num_agents(); ++i) {
      auto jac = agent_equality_jacobian(spec, traj, i);
      for (size_t r = 0; r < jac.size(); ++r) {
        const int col = n_free + nu_offset[i] + static_cast<int>(r);
        for (const auto& [j, v] : jac[r].entries) {
          const int k = coord_pos[j];
          if (k >= 0) J(k, col) = v;
        }
      }
    }
    for (size_t f = 0; f < faces.size(); ++f) {
      const Face& fc = faces[f];
      const int col = n_free + n_nu + static_cast<int>(f);
      FaceAffine fa = fc.cf->face_affine(traj.flat(), fc.cf->blocks()[fc.block], fc.face);
      SparseVec g = fa.grad(*fc.theta);
      const int owner = fc.cf->blocks()[fc.block].owner;
      std::set<int> owner_coords(agent_slice_indices(spec, owner).begin(),
                                 agent_slice_indices(spec, owner).end());
      for (const auto& [j, v] : g.entries) {
        const int k = coord_pos[j];
        if (k >= 0 && owner_coords.count(j)) J(k, col) = v;
      }
    }
    return J;
  }
};

NashResult NashSolver::solve(std::optional<Trajectory> init) {
  Trajectory traj = init ? *init : bent_init(spec_, cfg_.init_swerve);

  // Iterated best response.
  int sweeps = 0;
  for (; sweeps < cfg_.max_ibr_sweeps; ++sweeps) {
    VecX before = traj.flat();
    for (int i = 0; i < spec_.num_agents(); ++i) traj = best_response(i, traj);
    if ((traj.flat() - before).lpNorm<Eigen::Infinity>() < cfg_.ibr_tol) {
      ++sweeps;
      break;
    }
  }

  // Fix the active set from the IBR solution, then polish to stationarity.
  NashPolish polish(*this);
  auto collect_faces = [&](const Trajectory& t, double tol) {
    polish.faces.clear();
    auto scan = [&](const ConstraintFamily& cf, const VecX& th, bool known, int kidx) {
      const auto& blocks = cf.blocks();
      for (size_t b = 0; b < blocks.size(); ++b) {
        double block_min = 1e100;
        int best = 0;
        for (int f = 0; f < blocks[b].n_faces; ++f) {
          const double v = cf.face_affine(t.flat(), blocks[b], f).value(th);
          if (v < block_min) {
            block_min = v;
            best = f;
          }
        }
        if (block_min > -tol)
          polish.faces.push_back({&cf, &th, static_cast<int>(b), best, known, kidx});
      }
    };
    scan(*family_, theta_lifted_, false, -1);
    for (size_t k = 0; k < known_.size(); ++k)
      scan(*known_[k], known_theta_lifted_[k], true, static_cast<int>(k));
  };
  collect_faces(traj, 1e-5);

  VecX w = VecX::Zero(polish.dim());
  for (int k = 0; k < polish.n_free; ++k) w[k] = traj.flat()[polish.free_coords[k]];

  double fnorm = 1e100;
  for (int attempt = 0; attempt < 4; ++attempt) {
    for (int it = 0; it < cfg_.max_polish_iters; ++it) {
      VecX F = polish.residual(w, traj);
      fnorm = F.lpNorm<Eigen::Infinity>();
      if (fnorm < 1e-11) break;
      MatX J = polish.jacobian(w, traj);
      Eigen::FullPivLU<MatX> lu(J);
      VecX step = lu.solve(-F);
      double alpha = 1.0;
      for (int bt = 0; bt < 10; ++bt) {
        VecX wn = w + alpha * step;
        if (polish.residual(wn, traj).lpNorm<Eigen::Infinity>() < fnorm * (1 - 1e-4 * alpha) ||
            alpha < 1e-4) {
          w = wn;
          break;
        }
        alpha *= 0.5;
      }
    }
    // Enforce dual feasibility: drop faces with clearly negative multipliers.
    std::vector<NashPolish::Face> kept;
    bool dropped = false;
    for (size_t f = 0; f < polish.faces.size(); ++f) {
      const double lam = w[polish.n_free + polish.n_nu + static_cast<int>(f)];
      if (lam < -1e-7)
        dropped = true;
      else
        kept.push_back(polish.faces[f]);
    }
    if (!dropped) {
      // Check for violated inactive blocks at the polished point.
      Trajectory cur = traj;
      for (int k = 0; k < polish.n_free; ++k) cur.flat()[polish.free_coords[k]] = w[k];
      const size_t before = polish.faces.size();
      collect_faces(cur, -1e-9);  // only strictly violated/tight blocks
      std::set<std::tuple<const ConstraintFamily*, int, int>> prev;
      for (const auto& fc : kept) prev.insert({fc.cf, fc.block, fc.face});
      std::vector<NashPolish::Face> merged = kept;
      for (const auto& fc : polish.faces)
        if (!prev.count({fc.cf, fc.block, fc.face})) merged.push_back(fc);
      if (merged.size() == before && merged.size() == kept.size()) {
        polish.faces = kept;
        break;
      }
      polish.faces = merged;
    } else {
      polish.faces = kept;
    }
    VecX w2 = VecX::Zero(polish.dim());
    w2.head(polish.n_free + polish.n_nu) = w.head(polish.n_free + polish.n_nu);
    w = w2;
  }

  // Assemble the result.
  NashResult out{Trajectory::zeros(spec_), {}, {}, 0.0, 0.0, false, sweeps};
  Trajectory final_traj = traj;
  for (int k = 0; k < polish.n_free; ++k) final_traj.flat()[polish.free_coords[k]] = w[k];
  out.trajectory = final_traj;

  KktCertificate cert;
  cert.theta = theta_star_;
  cert.multipliers.resize(1);
  cert.stationarity_l1.resize(1);
  cert.stationarity_linf.resize(1);
  const auto& blocks = family_->blocks();
  out.active.selected_face.assign(blocks.size(), -1);
  for (int i = 0; i < spec_.num_agents(); ++i) {
    AgentMultipliers mult;
    const int H = agent_equality_rows(spec_, i);
    mult.nu = w.segment(polish.n_free + polish.nu_offset[i], H);
    // Dense unknown-face multipliers in blocks order.
    int own_faces = 0;
    for (const auto& b : blocks)
      if (b.owner == i) own_faces += b.n_faces;
    mult.lambda_unknown.assign(own_faces, 0.0);
    int known_faces = 0;
    for (size_t k = 0; k < known_.size(); ++k)
      for (const auto& b : known_[k]->blocks())
        if (b.owner == i) known_faces += b.n_faces;
    mult.lambda_known.assign(known_faces, 0.0);
    cert.multipliers[0].push_back(std::move(mult));
  }
  // Scatter face multipliers into the dense layout.
  auto face_offset = [&](const ConstraintFamily& cf, int owner, int block, int face) {
    int off = 0;
    const auto& bl = cf.blocks();
    for (int b = 0; b < block; ++b)
      if (bl[b].owner == owner) off += bl[b].n_faces;
    return off + face;
  };
  for (size_t f = 0; f < polish.faces.size(); ++f) {
    const auto& fc = polish.faces[f];
    const double lam = std::max(0.0, w[polish.n_free + polish.n_nu + static_cast<int>(f)]);
    const int owner = fc.cf->blocks()[fc.block].owner;
    if (!fc.known) {
      cert.multipliers[0][owner].lambda_unknown[face_offset(*fc.cf, owner, fc.block, fc.face)] = lam;
      out.active.selected_face[fc.block] = fc.face;
    } else {
      int off = 0;
      for (int k = 0; k < fc.known_idx; ++k) {
        for (const auto& b : known_[k]->blocks())
          if (b.owner == owner) off += b.n_faces;
      }
      cert.multipliers[0][owner]
          .lambda_known[off + face_offset(*fc.cf, owner, fc.block, fc.face)] = lam;
    }
  }

  DemonstrationSet one;
  one.scenario_hash = scenario_content_hash(spec_);
  one.trajectories.push_back(final_traj);
  StationarityReport rep = kkt_residual(spec_, theta_star_, one, cert);
  cert.stationarity_l1[0] = rep.l1[0];
  cert.stationarity_linf[0] = rep.linf[0];
  out.certificate = std::move(cert);
  out.stationarity_inf = rep.max_linf;

  double primal = dynamics_residual_inf(spec_, final_traj);
  EvaluatedConstraints ev = family_->eval(final_traj.flat(), theta_star_, false);
  primal = std::max(primal, ev.worst_block());
  for (size_t k = 0; k < known_.size(); ++k) {
    EvaluatedConstraints evk =
        known_[k]->eval(final_traj.flat(), spec_.known_constraints[k].theta, false);
    primal = std::max(primal, evk.worst_block());
  }
  for (const auto& pin : boundary_constraints(spec_))
    primal = std::max(primal,
                      std::abs(final_traj.flat()[pin_flat_index(spec_, pin)] - pin.value));
  out.primal_violation = primal;
  out.converged = rep.max_linf < cfg_.stationarity_tol && primal < 100 * cfg_.primal_tol;
  return out;
}

StationarityReport kkt_residual(const ScenarioSpec& spec, const VecX& theta_natural,
                                const DemonstrationSet& demos, const KktCertificate& cert) {
  StationarityReport rep;
  auto family = make_family(spec);
  const VecX tl = family->lift(theta_natural);
  std::vector<std::unique_ptr<ConstraintFamily>> known;
  std::vector<VecX> known_tl;
  for (const auto& k : spec.known_constraints) {
    known.push_back(make_known_family(spec, k));
    known_tl.push_back(known.back()->lift(k.theta));
  }
  for (int d = 0; d < demos.size(); ++d) {
    const Trajectory& traj = demos.trajectories[d];
    std::vector<double> l1_row, linf_row;
    for (int i = 0; i < spec.num_agents(); ++i) {
      VecX stat = cost_gradient(spec, i, traj);
      const auto& mult = cert.multipliers[d][i];
      auto jac = agent_equality_jacobian(spec, traj, i);
      for (size_t r = 0; r < jac.size(); ++r) jac[r].scatter_into(stat, mult.nu[static_cast<int>(r)]);
      int fi = 0;
      for (const auto& b : family->blocks()) {
        if (b.owner != i) continue;
        for (int f = 0; f < b.n_faces; ++f, ++fi) {
          const double lam = mult.lambda_unknown[fi];
          if (lam != 0.0)
            family->face_affine(traj.flat(), b, f).grad(tl).scatter_into(stat, lam);
        }
      }
      int ki = 0;
      for (size_t k = 0; k < known.size(); ++k) {
        for (const auto& b : known[k]->blocks()) {
          if (b.owner != i) continue;
          for (int f = 0; f < b.n_faces; ++f, ++ki) {
            const double lam = mult.lambda_known[ki];
            if (lam != 0.0)
              known[k]->face_affine(traj.flat(), b, f).grad(known_tl[k]).scatter_into(stat, lam);
          }
        }
      }
      double l1 = 0.0, linf = 0.0;
      for (int c : agent_slice_indices(spec, i)) {
        l1 += std::abs(stat[c]);
        linf = std::max(linf, std::abs(stat[c]));
      }
      l1_row.push_back(l1);
      linf_row.push_back(linf);
      rep.total_l1 += l1;
      rep.max_linf = std::max(rep.max_linf, linf);
    }
    rep.l1.push_back(l1_row);
    rep.linf.push_back(linf_row);
  }
  return rep;
}

DemonstrationSet generate_demos(const ScenarioSpec& spec, const VecX& theta_star, unsigned seed,
                                KktCertificate* cert_out) {
  NashConfig cfg;
  cfg.seed = seed;
  NashSolver solver(spec, theta_star, cfg);
  NashResult res = solver.solve();
  if (!res.converged)
    throw IkgError(IkgError::Kind::generic,
                   "demo generation did not certify: stationarity " +
                       std::to_string(res.stationarity_inf) + ", primal " +
                       std::to_string(res.primal_violation));
  DemonstrationSet demos;
  demos.scenario_hash = scenario_content_hash(spec);
  demos.trajectories.push_back(res.trajectory);
  if (cert_out) *cert_out = res.certificate;
  return demos;
}

}  // namespace ikg
