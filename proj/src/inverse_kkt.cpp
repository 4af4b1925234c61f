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

#include "ikg/inverse_kkt.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ikg/costs.hpp"
#include "ikg/dynamics.hpp"

namespace ikg {

namespace {

// Least squares with some variables constrained nonnegative (Lawson-Hanson
// style active set); free variables are always passive.
VecX nnls_mixed(const MatX& A, const VecX& b, int n_nonneg) {
  const int n = static_cast<int>(A.cols());
  std::vector<uint8_t> passive(n, 0);
  for (int j = n_nonneg; j < n; ++j) passive[j] = 1;  // free vars
  VecX x = VecX::Zero(n);
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    // Gradient of 0.5|Ax-b|^2.
    VecX g = A.transpose() * (A * x - b);
    int add = -1;
    double best = -1e-10;
    for (int j = 0; j < n_nonneg; ++j)
      if (!passive[j] && g[j] < best) {
        best = g[j];
        add = j;
      }
    if (add >= 0) passive[add] = 1;
    // Solve LS over passive set.
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    if (idx.empty()) break;
    MatX Ap(A.rows(), idx.size());
    for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    VecX xp = Ap.colPivHouseholderQr().solve(b);
    // Remove negative nonneg vars (simple variant: clamp and drop worst).
    int worst = -1;
    double most_neg = -1e-10;
    for (size_t k = 0; k < idx.size(); ++k)
      if (idx[k] < n_nonneg && xp[k] < most_neg) {
        most_neg = xp[k];
        worst = static_cast<int>(k);
      }
    if (worst >= 0) {
      passive[idx[worst]] = 0;
      continue;
    }
    x.setZero();
    for (size_t k = 0; k < idx.size(); ++k) x[idx[k]] = xp[k];
    if (add < 0) break;  // optimal: no improving variable and passive solution feasible
  }
  return x;
}

}  // namespace

InverseKkt::InverseKkt(const ScenarioSpec& spec, const DemonstrationSet& demos, InverseOptions opt)
    : spec_(spec), demos_(demos), opt_(opt) {
  if (demos_.size() < 1) throw data_quality_error("need at least one demonstration");
  family_ = make_family(spec_);
  if (opt_.mode == EncodeMode::exact_offset && !family_->offset_class())
    throw IkgError(IkgError::Kind::generic,
                   "family '" + family_->kind() +
                       "' is affine-parameterized; use the relaxed encoding");
  if (opt_.mode == EncodeMode::stationarity_min) opt_.tolerate_infeasible_demos = true;
  for (const auto& k : spec_.known_constraints) {
    known_.push_back(make_known_family(spec_, k));
    known_lifted_.push_back(known_.back()->lift(k.theta));
  }
  data_quality_check();
  encode();
}

void InverseKkt::data_quality_check() const {
  for (int d = 0; d < demos_.size(); ++d) {
    const Trajectory& traj = demos_.trajectories[d];
    if (traj.flat().size() != spec_.traj_dim())
      throw data_quality_error("demo " + std::to_string(d) + " has wrong length");
    const double dyn = dynamics_residual_inf(spec_, traj);
    double known_viol = 0.0;
    for (size_t k = 0; k < known_.size(); ++k) {
      EvaluatedConstraints ev =
          known_[k]->eval(traj.flat(), spec_.known_constraints[k].theta, false);
      known_viol = std::max(known_viol, ev.worst_block());
    }
    double pin_viol = 0.0;
    for (const auto& pin : boundary_constraints(spec_))
      pin_viol = std::max(pin_viol, std::abs(traj.flat()[pin_flat_index(spec_, pin)] - pin.value));
    const double worst = std::max({dyn, known_viol, pin_viol});
    if (worst > 1e-6 && !opt_.tolerate_infeasible_demos)
      throw data_quality_error("demo " + std::to_string(d) +
                               " violates known constraints by " + std::to_string(worst));
  }
}

void InverseKkt::encode() {
  const double M = opt_.milp.big_m;
  const double Mlo = opt_.milp.m_lower, Mhi = opt_.milp.m_upper;
  const int D = demos_.size();
  const auto lifted_bounds = family_->lifted_bounds();

  for (int c = 0; c < family_->lifted_dim(); ++c)
    theta_vars_.push_back(
        model_.add_continuous(family_->lifted_name(c), lifted_bounds[c].first,
                              lifted_bounds[c].second));
  if (opt_.joint_cost) {
    for (int i = 0; i < spec_.num_agents(); ++i)
      cost_weight_vars_.push_back(model_.add_continuous("cost_mix[" + std::to_string(i) + "]",
                                                        opt_.cost_weight_bounds.first,
                                                        opt_.cost_weight_bounds.second));
  }

  const auto& blocks = family_->blocks();
  face_vars_.assign(D, {});
  nu_vars_.assign(D, {});
  known_lambda_vars_.assign(D, {});

  for (int d = 0; d < D; ++d) {
    const Trajectory& traj = demos_.trajectories[d];
    face_vars_[d].resize(blocks.size());
    const std::string dn = "d" + std::to_string(d);

    // --- Unknown-family machinery per disjunctive block ---------------------
    for (size_t b = 0; b < blocks.size(); ++b) {
      const BlockRef& blk = blocks[b];
      const std::string bn = dn + "_b" + std::to_string(b);
      std::vector<int> slice = agent_slice_indices(spec_, blk.owner);
      std::set<int> slice_set(slice.begin(), slice.end());
      std::vector<std::pair<int, double>> cover_z, cover_q;
      for (int f = 0; f < blk.n_faces; ++f) {
        FaceAffine fa = family_->face_affine(traj.flat(), blk, f);
        FaceVarIds ids;
        const std::string fn = bn + "_f" + std::to_string(f);
        ids.z = model_.add_binary(fn + "_z");
        ids.zh1 = model_.add_binary(fn + "_zh1");
        ids.zh2 = model_.add_binary(fn + "_zh2");
        ids.q = model_.add_binary(fn + "_q");
        ids.qt = model_.add_binary(fn + "_qt");
        ids.lambda = model_.add_continuous(fn + "_lam", 0.0, M);

        // Primal feasibility: g(xi_d, theta) <= M (1 - z).
        {
          std::vector<std::pair<int, double>> row;
          for (int c = 0; c < family_->lifted_dim(); ++c)
            if (fa.g1[c] != 0.0) row.emplace_back(theta_vars_[c], fa.g1[c]);
          row.emplace_back(ids.z, M);
          if (fa.g0 - M > 0.0)
            model_.add_warning("big-M too small for primal row " + fn);
          model_.add_row(row, RowSense::le, M - fa.g0, fn + "_primal");
        }
        // Complementary slackness value rows:
        //   lambda <= M zh1,   -g(xi_d, theta) <= M zh2.
        model_.add_row({{ids.lambda, 1.0}, {ids.zh1, -M}}, RowSense::le, 0.0, fn + "_cs_lam");
        {
          std::vector<std::pair<int, double>> row;
          for (int c = 0; c < family_->lifted_dim(); ++c)
            if (fa.g1[c] != 0.0) row.emplace_back(theta_vars_[c], -fa.g1[c]);
          row.emplace_back(ids.zh2, -M);
          model_.add_row(row, RowSense::le, fa.g0, fn + "_cs_val");
        }
        // Enforcement pairing and the complement binary.
        model_.add_row({{ids.zh1, 1.0}, {ids.zh2, 1.0}, {ids.q, 1.0}}, RowSense::le, 2.0,
                       fn + "_cs_pair");
        model_.add_row({{ids.q, 1.0}, {ids.qt, 1.0}}, RowSense::eq, 1.0, fn + "_q_compl");

        // Gradient support on the owner slice.
        std::set<int> support;
        for (const auto& [cix, v] : fa.grad0.entries) {
          (void)v;
          if (slice_set.count(cix)) support.insert(cix);
        }
        for (const auto& gv : fa.grad1)
          for (const auto& [cix, v] : gv.entries) {
            (void)v;
            if (slice_set.count(cix)) support.insert(cix);
          }
        int e = 0;
        for (int cix : support) {
          const std::string en = fn + "_e" + std::to_string(e++);
          const int L = model_.add_continuous(en + "_L", Mlo, Mhi);
          if (opt_.mode == EncodeMode::exact_offset || !fa.grad_depends_on_theta()) {
            // L = lambda * d g / d xi(cix); gradient independent of theta.
            double g0c = 0.0;
            for (const auto& [ci, v] : fa.grad0.entries)
              if (ci == cix) g0c = v;
            model_.add_row({{L, 1.0}, {ids.lambda, -g0c}}, RowSense::eq, 0.0, en + "_Ldef");
          } else {
            // Relaxed: L stands for lambda * d g(theta) / d xi, gated by zh1.
            model_.add_row({{L, 1.0}, {ids.zh1, -Mhi}}, RowSense::le, 0.0, en + "_Lgate_hi");
            model_.add_row({{L, 1.0}, {ids.zh1, -Mlo}}, RowSense::ge, 0.0, en + "_Lgate_lo");
          }
          const int r = model_.linearize_binary_product(ids.q, L, Mlo, Mhi, en + "_r");
          ids.grad_coords.push_back(cix);
          ids.L.push_back(L);
          ids.r.push_back(r);
        }
        cover_z.emplace_back(ids.z, 1.0);
        cover_q.emplace_back(ids.q, 1.0);
        face_vars_[d][b].push_back(std::move(ids));
      }
      model_.add_row(cover_z, RowSense::ge, 1.0, bn + "_cover_z");
      model_.add_row(cover_q, RowSense::ge, 1.0, bn + "_cover_q");
    }

    // --- Known constraints: multipliers for active faces only ---------------
    known_lambda_vars_[d].resize(spec_.num_agents());
    for (size_t k = 0; k < known_.size(); ++k) {
      const auto& kb = known_[k]->blocks();
      std::vector<int> flat_face(spec_.num_agents(), 0);
      for (const auto& blk : kb) {
        for (int f = 0; f < blk.n_faces; ++f) {
          FaceAffine fa = known_[k]->face_affine(traj.flat(), blk, f);
          const double val = fa.value(known_lifted_[k]);
          if (std::abs(val) <= kTolActive) {
            KnownLambda kl;
            kl.known_idx = static_cast<int>(k);
            kl.flat_face = flat_face[blk.owner];
            kl.var = model_.add_continuous(
                dn + "_k" + std::to_string(k) + "_a" + std::to_string(blk.owner) + "_f" +
                    std::to_string(flat_face[blk.owner]) + "_lam",
                0.0, M);
            kl.grad = fa.grad(known_lifted_[k]);
            known_lambda_vars_[d][blk.owner].push_back(std::move(kl));
          }
          ++flat_face[blk.owner];
        }
      }
    }

    // --- Equality duals ------------------------------------------------------
    nu_vars_[d].resize(spec_.num_agents());
    for (int i = 0; i < spec_.num_agents(); ++i) {
      const int H = agent_equality_rows(spec_, i);
      for (int r = 0; r < H; ++r)
        nu_vars_[d][i].push_back(model_.add_continuous(
            dn + "_nu" + std::to_string(i) + "_" + std::to_string(r), -Mhi, Mhi));
    }

    // --- Stationarity rows ----------------------------------------------------
    for (int i = 0; i < spec_.num_agents(); ++i) {
      VecX grad0, grad1;
      if (opt_.joint_cost) {
        cost_gradient_decomposition(spec_, i, traj, grad0, grad1);
      } else {
        grad0 = cost_gradient(spec_, i, traj);
        grad1 = VecX::Zero(spec_.traj_dim());
      }
      auto eq_jac = agent_equality_jacobian(spec_, traj, i);
      // Collect per-coordinate terms.
      std::vector<std::vector<std::pair<int, double>>> coeffs(spec_.traj_dim());
      for (size_t r = 0; r < eq_jac.size(); ++r)
        for (const auto& [cix, v] : eq_jac[r].entries)
          coeffs[cix].emplace_back(nu_vars_[d][i][r], v);
      for (const auto& kl : known_lambda_vars_[d][i])
        for (const auto& [cix, v] : kl.grad.entries) coeffs[cix].emplace_back(kl.var, v);
      for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].owner != i) continue;
        for (const auto& ids : face_vars_[d][b])
          for (size_t e = 0; e < ids.grad_coords.size(); ++e)
            coeffs[ids.grad_coords[e]].emplace_back(ids.r[e], 1.0);
      }
      if (opt_.joint_cost && cost_weight_vars_.size()) {
        for (int cix : agent_slice_indices(spec_, i))
          if (grad1[cix] != 0.0) coeffs[cix].emplace_back(cost_weight_vars_[i], grad1[cix]);
      }
      for (int cix : agent_slice_indices(spec_, i)) {
        const double cst = grad0[cix];
        if (coeffs[cix].empty() && std::abs(cst) < 1e-12) continue;
        std::vector<std::pair<int, double>> row = coeffs[cix];
        if (opt_.mode == EncodeMode::stationarity_min) {
          const int sp = model_.add_continuous("s_plus", 0.0, kLpBoundClamp, 1.0);
          const int sm = model_.add_continuous("s_minus", 0.0, kLpBoundClamp, 1.0);
          slack_vars_.push_back(sp);
          slack_vars_.push_back(sm);
          row.emplace_back(sp, -1.0);
          row.emplace_back(sm, 1.0);
        }
        model_.add_row(row, RowSense::eq, -cst,
                       dn + "_stat" + std::to_string(i) + "_" + std::to_string(cix));
      }
    }
  }
}

long InverseKkt::binary_count() const { return model_.num_binaries(); }

const FaceVarIds& InverseKkt::face_vars(int demo, int block_idx, int face) const {
  return face_vars_[demo][block_idx][face];
}

std::pair<double, double> InverseKkt::theta_interval(int lifted_coord, bool* limit_hit) const {
  MilpModel m = model_;
  m.clear_objective();
  m.set_objective_coeff(theta_vars_[lifted_coord], 1.0);
  MilpSolution lo = solve_milp(m, opt_.milp);
  m.set_objective_coeff(theta_vars_[lifted_coord], -1.0);
  MilpSolution hi = solve_milp(m, opt_.milp);
  if (limit_hit)
    *limit_hit = lo.status == MilpStatus::iteration_limit || hi.status == MilpStatus::iteration_limit;
  const auto& bounds = family_->lifted_bounds()[lifted_coord];
  double lo_v = lo.status == MilpStatus::infeasible ? bounds.first
                                                    : lo.x[theta_vars_[lifted_coord]];
  double hi_v = hi.status == MilpStatus::infeasible ? bounds.second
                                                    : hi.x[theta_vars_[lifted_coord]];
  return {lo_v, hi_v};
}

double optimize_theta_direction(const InverseKkt& enc, const VecX& direction, bool maximize,
                                const MilpConfig& cfg, bool* ok) {
  MilpModel m = enc.model_copy();
  m.clear_objective();
  for (int c = 0; c < direction.size(); ++c)
    if (direction[c] != 0.0)
      m.set_objective_coeff(enc.theta_var(c), maximize ? -direction[c] : direction[c]);
  MilpSolution s = solve_milp(m, cfg);
  if (ok) *ok = s.status == MilpStatus::optimal;
  if (s.status != MilpStatus::optimal) return std::nan("");
  double v = 0.0;
  for (int c = 0; c < direction.size(); ++c) v += direction[c] * s.x[enc.theta_var(c)];
  return v;
}

InferenceResult InverseKkt::infer() {
  InferenceResult res;
  MilpSolution sol = solve_milp(model_, opt_.milp);
  res.stats = sol;
  if (sol.status == MilpStatus::infeasible) {
    res.status = "infeasible";
    res.notes.push_back("no theta in the bound box explains the demonstrations (misspecification evidence)");
    return res;
  }
  if (sol.status == MilpStatus::iteration_limit && sol.x.size() == 0) {
    res.status = "limit";
    return res;
  }
  res.status = "feasible";

  const int LD = family_->lifted_dim();
  res.theta_lifted.resize(LD);
  for (int c = 0; c < LD; ++c) res.theta_lifted[c] = sol.x[theta_vars_[c]];

  if (opt_.compute_intervals) {
    bool any_limit = false;
    for (int c = 0; c < LD; ++c) {
      bool lim = false;
      res.theta_interval.push_back(theta_interval(c, &lim));
      any_limit = any_limit || lim;
    }
    if (any_limit) res.notes.push_back("interval extraction hit solver limits; bounds may be loose");
    // Point estimate: per-coordinate interval midpoints.
    for (int c = 0; c < LD; ++c) {
      res.theta_lifted[c] = 0.5 * (res.theta_interval[c].first + res.theta_interval[c].second);
      res.identified.push_back(res.theta_interval[c].second - res.theta_interval[c].first <= 2e-3);
    }
    for (int c = 0; c < LD; ++c)
      if (!res.identified[c])
        res.notes.push_back("unidentified - interval returned for " + family_->lifted_name(c));
  }

  res.theta = family_->natural_from_lifted(res.theta_lifted);
  const double defect = family_->lift_consistency(res.theta_lifted);
  if (defect > 1e-3) {
    // Lifted-coordinate consistency failed; re-solve on a grid of the lifted
    // square term with both coordinates pinned together.
    res.notes.push_back("lift consistency defect " + std::to_string(defect) +
                        "; re-solving on a 1-D grid");
    bool fixed = false;
    const auto lb = family_->lifted_bounds();
    for (int a = 0; a < spec_.num_agents() && !fixed; ++a) {
      // grid over theta6 of agent a (velocity_sphere layout: 3 per agent)
      const int c6 = 3 * a + 1, c6s = 3 * a + 2;
      if (c6s >= LD) break;
      const auto [lo, hi] = lb[c6];
      for (int g = 0; g <= 40; ++g) {
        const double v = lo + (hi - lo) * g / 40.0;
        MilpModel m = model_;
        m.set_bounds(theta_vars_[c6], v, v);
        m.set_bounds(theta_vars_[c6s], v * v, v * v);
        MilpSolution s2 = solve_milp(m, opt_.milp);
        if (s2.status == MilpStatus::optimal) {
          for (int c = 0; c < LD; ++c) res.theta_lifted[c] = s2.x[theta_vars_[c]];
          res.theta = family_->natural_from_lifted(res.theta_lifted);
          fixed = true;
          break;
        }
      }
    }
  }

  if (opt_.joint_cost) {
    res.cost_weights.resize(spec_.num_agents());
    for (int i = 0; i < spec_.num_agents(); ++i) res.cost_weights[i] = sol.x[cost_weight_vars_[i]];
  }

  // Independent re-check outside the MILP.
  if (family_->theta_in_bounds(res.theta, 1e-6)) {
    res.recert_residual_l1 = recertify(res.theta);
    res.recertified = res.recert_residual_l1 < opt_.recert_tol;
    if (!res.recertified && sol.x.size()) {
      // Midpoint fell outside the (possibly nonconvex) feasible set; fall
      // back to the solver's vertex.
      VecX vertex(LD);
      for (int c = 0; c < LD; ++c) vertex[c] = sol.x[theta_vars_[c]];
      VecX nat = family_->natural_from_lifted(vertex);
      const double r2 = recertify(nat);
      if (r2 < res.recert_residual_l1) {
        res.theta_lifted = vertex;
        res.theta = nat;
        res.recert_residual_l1 = r2;
        res.recertified = r2 < opt_.recert_tol;
        res.notes.push_back("midpoint not re-certifiable; reported the solver vertex instead");
      }
    }
  }
  return res;
}

InferenceResult InverseKkt::infer_suboptimal() {
  if (opt_.mode != EncodeMode::stationarity_min)
    throw IkgError(IkgError::Kind::generic, "infer_suboptimal requires stationarity_min mode");
  InferenceResult res;
  MilpSolution sol = solve_milp(model_, opt_.milp);
  res.stats = sol;
  if (sol.status == MilpStatus::infeasible) {
    res.status = "infeasible";
    return res;
  }
  res.status = sol.status == MilpStatus::iteration_limit ? "limit" : "feasible";
  if (sol.x.size() == 0) return res;
  res.stationarity_error = sol.objective;
  res.theta_lifted.resize(family_->lifted_dim());
  for (int c = 0; c < family_->lifted_dim(); ++c) res.theta_lifted[c] = sol.x[theta_vars_[c]];
  res.theta = family_->natural_from_lifted(res.theta_lifted);
  if (opt_.joint_cost) {
    res.cost_weights.resize(spec_.num_agents());
    for (int i = 0; i < spec_.num_agents(); ++i) res.cost_weights[i] = sol.x[cost_weight_vars_[i]];
  }
  return res;
}

VecX InverseKkt::assignment_from_certificate(const VecX& theta_natural,
                                             const KktCertificate& cert) const {
  VecX x = VecX::Zero(model_.num_vars());
  const VecX tl = family_->lift(theta_natural);
  for (int c = 0; c < family_->lifted_dim(); ++c) x[theta_vars_[c]] = tl[c];
  for (size_t i = 0; i < cost_weight_vars_.size(); ++i)
    x[cost_weight_vars_[i]] = spec_.cost_params[i].mix_weight;
  const auto& blocks = family_->blocks();
  for (int d = 0; d < demos_.size(); ++d) {
    const Trajectory& traj = demos_.trajectories[d];
    std::vector<int> face_counter(spec_.num_agents(), 0);
    for (size_t b = 0; b < blocks.size(); ++b) {
      const BlockRef& blk = blocks[b];
      for (int f = 0; f < blk.n_faces; ++f) {
        const FaceVarIds& ids = face_vars_[d][b][f];
        FaceAffine fa = family_->face_affine(traj.flat(), blk, f);
        const double g = fa.value(tl);
        const double lam = cert.multipliers[d][blk.owner].lambda_unknown[face_counter[blk.owner]];
        ++face_counter[blk.owner];
        x[ids.z] = (g <= kTolActive) ? 1.0 : 0.0;
        x[ids.lambda] = lam;
        x[ids.zh1] = (lam > 0.0) ? 1.0 : 0.0;
        x[ids.zh2] = (g < -kTolActive) ? 1.0 : 0.0;
        x[ids.q] = 1.0;
        x[ids.qt] = 0.0;
        SparseVec grad = fa.grad(tl);
        for (size_t e = 0; e < ids.grad_coords.size(); ++e) {
          double gc = 0.0;
          for (const auto& [ci, v] : grad.entries)
            if (ci == ids.grad_coords[e]) gc = v;
          x[ids.L[e]] = lam * gc;
          x[ids.r[e]] = lam * gc;
        }
      }
    }
    for (int i = 0; i < spec_.num_agents(); ++i) {
      for (size_t r = 0; r < nu_vars_[d][i].size(); ++r)
        x[nu_vars_[d][i][r]] = cert.multipliers[d][i].nu[static_cast<int>(r)];
      for (const auto& kl : known_lambda_vars_[d][i])
        x[kl.var] = cert.multipliers[d][i].lambda_known[kl.flat_face];
    }
  }
  // Stationarity slacks (if any) follow from the row residuals; zero for
  // exact certificates.
  return x;
}

double InverseKkt::recertify(const VecX& theta_natural, KktCertificate* cert_out) const {
  const VecX tl = family_->lift(theta_natural);
  const auto& blocks = family_->blocks();
  KktCertificate cert;
  cert.theta = theta_natural;
  cert.multipliers.resize(demos_.size());
  double total_l1 = 0.0;
  for (int d = 0; d < demos_.size(); ++d) {
    const Trajectory& traj = demos_.trajectories[d];
    for (int i = 0; i < spec_.num_agents(); ++i) {
      std::vector<int> slice = agent_slice_indices(spec_, i);
      std::vector<int> pos(spec_.traj_dim(), -1);
      for (size_t k = 0; k < slice.size(); ++k) pos[slice[k]] = static_cast<int>(k);
      // Candidate multipliers: near-active unknown faces (nonneg), active
      // known faces (nonneg), then equality duals (free).
      struct Cand {
        SparseVec grad;
        int dense_idx;  // into lambda_unknown / lambda_known
        bool known;
      };
      std::vector<Cand> cands;
      int fi = 0;
      for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].owner != i) {
          continue;
        }
        for (int f = 0; f < blocks[b].n_faces; ++f, ++fi) {
          FaceAffine fa = family_->face_affine(traj.flat(), blocks[b], f);
          if (std::abs(fa.value(tl)) <= opt_.recert_active_tol)
            cands.push_back({fa.grad(tl), fi, false});
        }
      }
      int ki = 0;
      for (size_t k = 0; k < known_.size(); ++k)
        for (const auto& blk : known_[k]->blocks()) {
          if (blk.owner != i) continue;
          for (int f = 0; f < blk.n_faces; ++f, ++ki) {
            FaceAffine fa = known_[k]->face_affine(traj.flat(), blk, f);
            if (std::abs(fa.value(known_lifted_[k])) <= kTolActive)
              cands.push_back({fa.grad(known_lifted_[k]), ki, true});
          }
        }
      auto eq_jac = agent_equality_jacobian(spec_, traj, i);
      const int n_lam = static_cast<int>(cands.size());
      const int n_nu = static_cast<int>(eq_jac.size());
      MatX A = MatX::Zero(slice.size(), n_lam + n_nu);
      VecX b = VecX::Zero(slice.size());
      VecX grad = cost_gradient(spec_, i, traj);
      for (size_t k = 0; k < slice.size(); ++k) b[k] = -grad[slice[k]];
      for (int c = 0; c < n_lam; ++c)
        for (const auto& [ci, v] : cands[c].grad.entries)
          if (pos[ci] >= 0) A(pos[ci], c) = v;
      for (int r = 0; r < n_nu; ++r)
        for (const auto& [ci, v] : eq_jac[r].entries)
          if (pos[ci] >= 0) A(pos[ci], n_lam + r) = v;
      VecX sol = nnls_mixed(A, b, n_lam);
      VecX resid = A * sol - b;
      total_l1 += resid.lpNorm<1>();

      AgentMultipliers mult;
      mult.nu = sol.tail(n_nu);
      int own_unknown = 0;
      for (const auto& blk : blocks)
        if (blk.owner == i) own_unknown += blk.n_faces;
      int own_known = 0;
      for (size_t k = 0; k < known_.size(); ++k)
        for (const auto& blk : known_[k]->blocks())
          if (blk.owner == i) own_known += blk.n_faces;
      mult.lambda_unknown.assign(own_unknown, 0.0);
      mult.lambda_known.assign(own_known, 0.0);
      for (int c = 0; c < n_lam; ++c) {
        if (cands[c].known)
          mult.lambda_known[cands[c].dense_idx] = std::max(0.0, sol[c]);
        else
          mult.lambda_unknown[cands[c].dense_idx] = std::max(0.0, sol[c]);
      }
      cert.multipliers[d].push_back(std::move(mult));
    }
  }
  StationarityReport rep;
  DemonstrationSet tmp = demos_;
  rep = kkt_residual(spec_, theta_natural, tmp, cert);
  cert.stationarity_l1 = rep.l1;
  cert.stationarity_linf = rep.linf;
  if (cert_out) *cert_out = cert;
  return rep.total_l1;
}

Json inference_result_to_json(const InferenceResult& r) {
  Json j;
  j["status"] = r.status;
  Json theta = Json::array();
  for (int c = 0; c < r.theta.size(); ++c) theta.push_back(r.theta[c]);
  j["theta"] = theta;
  if (!r.theta_interval.empty()) {
    Json iv = Json::array();
    for (const auto& [lo, hi] : r.theta_interval) iv.push_back(Json::array({lo, hi}));
    j["theta_interval"] = iv;
  }
  j["stationarity_error"] = r.stationarity_error;
  j["solver_stats"] = {{"nodes", r.stats.nodes},
                       {"simplex_iterations", r.stats.simplex_iterations},
                       {"wall_time", r.stats.wall_time}};
  if (r.cost_weights.size()) {
    Json w = Json::array();
    for (int c = 0; c < r.cost_weights.size(); ++c) w.push_back(r.cost_weights[c]);
    j["cost_weights"] = w;
  }
  j["recertified"] = r.recertified;
  j["recert_residual_l1"] = r.recert_residual_l1;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace ikg
