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

#include "ikg/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace ikg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int MilpModel::add_continuous(const std::string& name, double lo, double hi, double obj) {
  lo_.push_back(std::max(lo, -kLpBoundClamp));
  hi_.push_back(std::min(hi, kLpBoundClamp));
  obj_.push_back(obj);
  binary_.push_back(0);
  var_names_.push_back(name);
  return num_vars() - 1;
}

int MilpModel::add_binary(const std::string& name, double obj) {
  lo_.push_back(0.0);
  hi_.push_back(1.0);
  obj_.push_back(obj);
  binary_.push_back(1);
  var_names_.push_back(name);
  return num_vars() - 1;
}

int MilpModel::add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs,
                       const std::string& name) {
  for (const auto& [j, v] : coeffs) {
    if (j < 0 || j >= num_vars())
      throw IkgError(IkgError::Kind::generic, "row references undeclared variable");
    if (!std::isfinite(v)) throw IkgError(IkgError::Kind::generic, "non-finite row coefficient");
  }
  std::sort(coeffs.begin(), coeffs.end());
  // Merge duplicate indices.
  std::vector<std::pair<int, double>> merged;
  for (const auto& e : coeffs) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  rows_.push_back({std::move(merged), sense, rhs});
  row_names_.push_back(name);
  return num_rows() - 1;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count(binary_.begin(), binary_.end(), 1));
}

void MilpModel::set_bounds(int var, double lo, double hi) {
  lo_[var] = lo;
  hi_[var] = hi;
}

void MilpModel::set_objective_coeff(int var, double c) { obj_[var] = c; }

void MilpModel::clear_objective() { std::fill(obj_.begin(), obj_.end(), 0.0); }

std::vector<int> MilpModel::add_disjunction_bigM(const std::vector<LpRow>& ge_rows,
                                                 const std::string& selector_name, double big_m) {
  if (ge_rows.empty())
    throw IkgError(IkgError::Kind::generic, "add_disjunction_bigM: no rows given");
  std::vector<int> zs;
  std::vector<std::pair<int, double>> cover;
  for (size_t k = 0; k < ge_rows.size(); ++k) {
    const int z = add_binary(selector_name + "_z" + std::to_string(k));
    zs.push_back(z);
    // coeffs.x >= rhs - M(1 - z)   ==>   coeffs.x - M z >= rhs - M
    LpRow relaxed = ge_rows[k];
    // Audit: M must cover the worst violation of the base row over the box.
    const auto [amin, amax] = row_activity_range(ge_rows[k]);
    (void)amax;
    if (ge_rows[k].rhs - amin > big_m)
      warnings_.push_back("big-M too small for " + selector_name + "_z" + std::to_string(k) +
                          ": need " + std::to_string(ge_rows[k].rhs - amin));
    relaxed.coeffs.emplace_back(z, -big_m);
    relaxed.sense = RowSense::ge;
    relaxed.rhs = ge_rows[k].rhs - big_m;
    add_row(relaxed.coeffs, relaxed.sense, relaxed.rhs, selector_name + "_pick" + std::to_string(k));
    cover.emplace_back(z, 1.0);
  }
  add_row(cover, RowSense::ge, 1.0, selector_name + "_cover");
  return zs;
}

int MilpModel::linearize_binary_product(int q, int ell, double m_lower, double m_upper,
                                        const std::string& name) {
  if (!binary_[q])
    throw IkgError(IkgError::Kind::generic, "linearize_binary_product: q must be binary");
  if (lo_[ell] < m_lower - 1e-12 || hi_[ell] > m_upper + 1e-12 || lo_[ell] <= -kLpBoundClamp ||
      hi_[ell] >= kLpBoundClamp)
    throw IkgError(IkgError::Kind::generic,
                   "linearize_binary_product: ell needs explicit bounds inside [m_lower, m_upper]");
  const int r = add_continuous(name, std::min(0.0, m_lower), m_upper);
  add_row({{r, 1.0}, {q, -m_upper}}, RowSense::le, 0.0, name + "_ub_q");
  add_row({{r, 1.0}, {q, -m_lower}}, RowSense::ge, 0.0, name + "_lb_q");
  add_row({{ell, 1.0}, {r, -1.0}, {q, m_upper}}, RowSense::le, m_upper, name + "_lb_ell");
  add_row({{r, 1.0}, {ell, -1.0}, {q, -m_lower}}, RowSense::le, -m_lower, name + "_ub_ell");
  add_row({{r, 1.0}, {ell, -1.0}, {q, m_upper}}, RowSense::le, m_upper, name + "_ub_ell2");
  return r;
}

std::pair<double, double> MilpModel::row_activity_range(const LpRow& row) const {
  double amin = 0.0, amax = 0.0;
  for (const auto& [j, v] : row.coeffs) {
    if (v > 0) {
      amin += v * lo_[j];
      amax += v * hi_[j];
    } else {
      amin += v * hi_[j];
      amax += v * lo_[j];
    }
  }
  return {amin, amax};
}

double MilpModel::row_box_violation(const LpRow& row) const {
  const auto [amin, amax] = row_activity_range(row);
  switch (row.sense) {
    case RowSense::le:
      return std::max(0.0, amax - row.rhs);
    case RowSense::ge:
      return std::max(0.0, row.rhs - amin);
    case RowSense::eq:
      return std::max({0.0, amax - row.rhs, row.rhs - amin});
  }
  return 0.0;
}

double MilpModel::eval_row(const LpRow& row, const VecX& x) const {
  double s = 0.0;
  for (const auto& [j, v] : row.coeffs) s += v * x[j];
  return s;
}

double MilpModel::max_violation(const VecX& x) const {
  double worst = 0.0;
  for (const auto& row : rows_) {
    const double a = eval_row(row, x);
    switch (row.sense) {
      case RowSense::le:
        worst = std::max(worst, a - row.rhs);
        break;
      case RowSense::ge:
        worst = std::max(worst, row.rhs - a);
        break;
      case RowSense::eq:
        worst = std::max(worst, std::abs(a - row.rhs));
        break;
    }
  }
  for (int j = 0; j < num_vars(); ++j)
    worst = std::max({worst, lo_[j] - x[j], x[j] - hi_[j]});
  return worst;
}

// ---------------------------------------------------------------------------
// Presolve: bound tightening, redundant-row removal, fixed-variable
// substitution, then connected-component splitting.
// ---------------------------------------------------------------------------

namespace {

struct Presolved {
  bool infeasible = false;
  std::vector<double> lo, hi;          // tightened bounds, original indexing
  std::vector<uint8_t> row_redundant;  // original rows proven always-satisfied
};

Presolved tighten(const MilpModel& model, const MilpConfig& cfg) {
  Presolved out;
  out.lo = model.lo();
  out.hi = model.hi();
  out.row_redundant.assign(model.num_rows(), 0);
  const auto& rows = model.rows();

  auto activity = [&](const LpRow& row) {
    double amin = 0.0, amax = 0.0;
    for (const auto& [j, v] : row.coeffs) {
      if (v > 0) {
        amin += v * out.lo[j];
        amax += v * out.hi[j];
      } else {
        amin += v * out.hi[j];
        amax += v * out.lo[j];
      }
    }
    return std::make_pair(amin, amax);
  };

  bool changed = true;
  for (int pass = 0; pass < 25 && changed; ++pass) {
    changed = false;
    for (int r = 0; r < model.num_rows(); ++r) {
      if (out.row_redundant[r]) continue;
      const LpRow& row = rows[r];
      auto [amin, amax] = activity(row);
      const bool need_le = row.sense != RowSense::ge;  // activity <= rhs
      const bool need_ge = row.sense != RowSense::le;  // activity >= rhs
      if (need_le && amin > row.rhs + 1e-7) {
        out.infeasible = true;
        return out;
      }
      if (need_ge && amax < row.rhs - 1e-7) {
        out.infeasible = true;
        return out;
      }
      const bool red_le = !need_le || amax <= row.rhs + 1e-9;
      const bool red_ge = !need_ge || amin >= row.rhs - 1e-9;
      if (red_le && red_ge) {
        out.row_redundant[r] = 1;
        changed = true;
        continue;
      }
      // Per-variable implied bounds.
      for (const auto& [j, v] : row.coeffs) {
        if (std::abs(v) < 1e-12) continue;
        const double cmin = (v > 0 ? v * out.lo[j] : v * out.hi[j]);
        if (need_le) {
          const double slack = row.rhs - (amin - cmin);  // allowance for v * x_j
          double nb = slack / v;
          if (v > 0 && nb < out.hi[j] - 1e-9) {
            out.hi[j] = nb;
            changed = true;
          } else if (v < 0 && nb > out.lo[j] + 1e-9) {
            out.lo[j] = nb;
            changed = true;
          }
        }
        if (need_ge) {
          const double cmax = (v > 0 ? v * out.hi[j] : v * out.lo[j]);
          const double slack = row.rhs - (amax - cmax);
          double nb = slack / v;
          if (v > 0 && nb > out.lo[j] + 1e-9) {
            out.lo[j] = nb;
            changed = true;
          } else if (v < 0 && nb < out.hi[j] - 1e-9) {
            out.hi[j] = nb;
            changed = true;
          }
        }
        if (model.is_binary(j)) {
          if (out.lo[j] > cfg.tol_int && out.lo[j] < 1.0) {
            out.lo[j] = 1.0;
            changed = true;
          }
          if (out.hi[j] < 1.0 - cfg.tol_int && out.hi[j] > 0.0) {
            out.hi[j] = 0.0;
            changed = true;
          }
        }
        if (out.lo[j] > out.hi[j] + 1e-7) {
          out.infeasible = true;
          return out;
        }
      }
    }
  }
  return out;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct BbNode {
  int parent = -1;
  int branch_var = -1;
  double blo = 0.0, bhi = 0.0;
  double est_bound = -kInf;
  int depth = 0;
  int basis_of = -1;  // index into stored bases (parent's solve)
};

// Branch & bound over one independent component.
MilpSolution solve_component(const MilpModel& model, const MilpConfig& cfg,
                             const std::vector<int>& vars, const std::vector<int>& rowset,
                             const std::vector<double>& lo0, const std::vector<double>& hi0,
                             std::chrono::steady_clock::time_point deadline) {
  // Local LP over the component.
  std::vector<int> local_of(model.num_vars(), -1);
  for (size_t k = 0; k < vars.size(); ++k) local_of[vars[k]] = static_cast<int>(k);
  LpProblem lp;
  for (int v : vars) lp.add_var(lo0[v], hi0[v], model.objective_coeff(v));
  for (int r : rowset) {
    const LpRow& row = model.rows()[r];
    std::vector<std::pair<int, double>> coeffs;
    for (const auto& [j, c] : row.coeffs) coeffs.emplace_back(local_of[j], c);
    lp.add_row(std::move(coeffs), row.sense, row.rhs);
  }
  std::vector<int> local_binaries;
  for (size_t k = 0; k < vars.size(); ++k)
    if (model.is_binary(vars[k]) && lp.lo[k] < lp.hi[k]) local_binaries.push_back(static_cast<int>(k));

  MilpSolution sol;
  std::vector<BbNode> nodes;
  std::vector<LpBasis> bases;
  nodes.push_back({});
  // Best-bound node selection; ties resolved toward the most recent node.
  auto cmp = [&](int a, int b) {
    if (nodes[a].est_bound != nodes[b].est_bound) return nodes[a].est_bound > nodes[b].est_bound;
    return a < b;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> open(cmp);
  open.push(0);

  double incumbent_obj = kInf;
  VecX incumbent;
  bool have_incumbent = false;
  const bool pure_feasibility = [&] {
    for (int v : vars)
      if (model.objective_coeff(v) != 0.0) return false;
    return true;
  }();

  std::vector<double> wlo(vars.size()), whi(vars.size());
  auto apply_bounds = [&](int node) {
    for (size_t k = 0; k < vars.size(); ++k) {
      wlo[k] = lp.lo[k];
      whi[k] = lp.hi[k];
    }
    for (int cur = node; cur > 0; cur = nodes[cur].parent) {
      const int v = nodes[cur].branch_var;
      wlo[v] = std::max(wlo[v], nodes[cur].blo);
      whi[v] = std::min(whi[v], nodes[cur].bhi);
    }
  };

  auto lp_with_bounds = [&](const LpBasis* warm) {
    LpProblem sub = lp;
    sub.lo.assign(wlo.begin(), wlo.end());
    sub.hi.assign(whi.begin(), whi.end());
    return solve_lp(sub, 0, warm);
  };

  auto integral = [&](const VecX& x) {
    for (int b : local_binaries)
      if (std::abs(x[b] - std::round(x[b])) > cfg.tol_int) return false;
    return true;
  };

  auto try_incumbent = [&](const VecX& x, double obj) {
    if (obj < incumbent_obj - 1e-9 || !have_incumbent) {
      incumbent_obj = obj;
      incumbent = x;
      have_incumbent = true;
    }
  };

  while (!open.empty()) {
    if (sol.nodes >= cfg.node_limit || std::chrono::steady_clock::now() > deadline) {
      sol.hit_limit = true;
      break;
    }
    const int id = open.top();
    open.pop();
    BbNode nd = nodes[id];
    if (have_incumbent && nd.est_bound >= incumbent_obj - 1e-9) continue;  // pruned by bound
    ++sol.nodes;
    apply_bounds(id);
    const LpBasis* warm = (nd.basis_of >= 0) ? &bases[nd.basis_of] : nullptr;
    LpResult r = lp_with_bounds(warm);
    sol.simplex_iterations += r.iterations;
    if (r.status == LpStatus::iteration_limit) {
      sol.hit_limit = true;
      break;
    }
    if (r.status == LpStatus::infeasible) continue;
    if (have_incumbent && r.objective >= incumbent_obj - 1e-9) continue;
    if (integral(r.x)) {
      try_incumbent(r.x, r.objective);
      if (pure_feasibility) break;
      continue;
    }
    // Rounding heuristic: fix binaries to the rounded LP values.
    if (!have_incumbent || nd.depth % 4 == 0) {
      LpProblem sub = lp;
      sub.lo.assign(wlo.begin(), wlo.end());
      sub.hi.assign(whi.begin(), whi.end());
      for (int b : local_binaries) {
        const double v = std::round(r.x[b]);
        sub.lo[b] = std::max(sub.lo[b], v);
        sub.hi[b] = std::min(sub.hi[b], v);
        if (sub.lo[b] > sub.hi[b]) {
          sub.lo[b] = v;
          sub.hi[b] = v;
        }
      }
      LpResult h = solve_lp(sub, 0, &r.basis);
      sol.simplex_iterations += h.iterations;
      if (h.status == LpStatus::optimal && integral(h.x)) try_incumbent(h.x, h.objective);
      if (have_incumbent && pure_feasibility) break;
    }
    // Branch on the most fractional binary (ties to the lowest index).
    int bv = -1;
    double best_frac = cfg.tol_int;
    for (int b : local_binaries) {
      const double f = std::abs(r.x[b] - std::round(r.x[b]));
      if (f > best_frac + 1e-12) {
        best_frac = f;
        bv = b;
      }
    }
    if (bv < 0) continue;  // numerically integral after all
    bases.push_back(r.basis);
    const int basis_id = static_cast<int>(bases.size()) - 1;
    const double xf = r.x[bv];
    BbNode down{id, bv, 0.0, 0.0, r.objective, nd.depth + 1, basis_id};
    BbNode up{id, bv, 1.0, 1.0, r.objective, nd.depth + 1, basis_id};
    // Push the rounded branch last so LIFO tie-breaking dives toward it.
    if (xf >= 0.5) {
      nodes.push_back(down);
      open.push(static_cast<int>(nodes.size()) - 1);
      nodes.push_back(up);
      open.push(static_cast<int>(nodes.size()) - 1);
    } else {
      nodes.push_back(up);
      open.push(static_cast<int>(nodes.size()) - 1);
      nodes.push_back(down);
      open.push(static_cast<int>(nodes.size()) - 1);
    }
  }

  if (have_incumbent) {
    sol.status = sol.hit_limit && !pure_feasibility ? MilpStatus::iteration_limit
                                                    : MilpStatus::optimal;
    if (sol.hit_limit && pure_feasibility) sol.status = MilpStatus::optimal;
    sol.objective = incumbent_obj;
    sol.x = VecX::Zero(model.num_vars());
    for (size_t k = 0; k < vars.size(); ++k) sol.x[vars[k]] = incumbent[static_cast<int>(k)];
  } else {
    sol.status = sol.hit_limit ? MilpStatus::iteration_limit : MilpStatus::infeasible;
  }
  return sol;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(cfg.time_limit));
  MilpSolution total;
  total.x = VecX::Zero(model.num_vars());

  Presolved pre;
  if (cfg.presolve) {
    pre = tighten(model, cfg);
  } else {
    pre.lo = model.lo();
    pre.hi = model.hi();
    pre.row_redundant.assign(model.num_rows(), 0);
  }
  auto finish = [&](MilpStatus st) {
    total.status = st;
    total.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return total;
  };
  if (pre.infeasible) return finish(MilpStatus::infeasible);

  // Fixed variables take their value; remaining vars join components.
  std::vector<uint8_t> fixed(model.num_vars(), 0);
  for (int j = 0; j < model.num_vars(); ++j) {
    if (pre.hi[j] - pre.lo[j] <= 1e-11) {
      fixed[j] = 1;
      total.x[j] = 0.5 * (pre.lo[j] + pre.hi[j]);
      if (model.is_binary(j)) total.x[j] = std::round(total.x[j]);
      total.objective += model.objective_coeff(j) * total.x[j];
    }
  }

  // Substitute fixed vars into rows; drop rows that became redundant.
  MilpModel work;  // holds reduced rows referencing original indices via map
  std::vector<int> var_map(model.num_vars(), -1);
  std::vector<int> active_vars;
  for (int j = 0; j < model.num_vars(); ++j)
    if (!fixed[j]) {
      var_map[j] = static_cast<int>(active_vars.size());
      active_vars.push_back(j);
    }

  struct RedRow {
    LpRow row;  // indices into active_vars
    int orig;
  };
  std::vector<RedRow> red_rows;
  for (int r = 0; r < model.num_rows(); ++r) {
    if (pre.row_redundant[r]) continue;
    const LpRow& row = model.rows()[r];
    LpRow nr;
    nr.sense = row.sense;
    nr.rhs = row.rhs;
    for (const auto& [j, v] : row.coeffs) {
      if (fixed[j])
        nr.rhs -= v * total.x[j];
      else
        nr.coeffs.emplace_back(var_map[j], v);
    }
    if (nr.coeffs.empty()) {
      const bool ok = (nr.sense == RowSense::le && 0.0 <= nr.rhs + cfg.tol_feas) ||
                      (nr.sense == RowSense::ge && 0.0 >= nr.rhs - cfg.tol_feas) ||
                      (nr.sense == RowSense::eq && std::abs(nr.rhs) <= cfg.tol_feas);
      if (!ok) return finish(MilpStatus::infeasible);
      continue;
    }
    red_rows.push_back({std::move(nr), r});
  }

  // Unreferenced free variables: place at the bound closest to zero (or zero).
  std::vector<uint8_t> referenced(active_vars.size(), 0);
  for (const auto& rr : red_rows)
    for (const auto& [k, v] : rr.row.coeffs) {
      (void)v;
      referenced[k] = 1;
    }
  const int nact = static_cast<int>(active_vars.size());

  // Reduced model in a scratch MilpModel so solve_component can reuse it.
  MilpModel reduced;
  for (int k = 0; k < nact; ++k) {
    const int j = active_vars[k];
    if (model.is_binary(j)) {
      reduced.add_binary(model.var_name(j), model.objective_coeff(j));
      reduced.set_bounds(k, pre.lo[j], pre.hi[j]);
    } else {
      reduced.add_continuous(model.var_name(j), pre.lo[j], pre.hi[j], model.objective_coeff(j));
    }
  }
  for (const auto& rr : red_rows) reduced.add_row(rr.row.coeffs, rr.row.sense, rr.row.rhs);

  for (int k = 0; k < nact; ++k) {
    if (referenced[k]) continue;
    const double lo = reduced.lo()[k], hi = reduced.hi()[k];
    double v = 0.0;
    if (lo > 0.0) v = lo;
    if (hi < 0.0) v = hi;
    if (reduced.objective_coeff(k) > 0.0) v = lo;
    if (reduced.objective_coeff(k) < 0.0) v = hi;
    total.x[active_vars[k]] = v;
    total.objective += reduced.objective_coeff(k) * v;
  }

  // Connected components over referenced vars.
  DisjointSet ds(nact);
  for (const auto& rr : red_rows)
    for (size_t e = 1; e < rr.row.coeffs.size(); ++e)
      ds.unite(rr.row.coeffs[0].first, rr.row.coeffs[e].first);
  std::vector<std::vector<int>> comp_vars_by_root(nact);
  for (int k = 0; k < nact; ++k)
    if (referenced[k]) comp_vars_by_root[ds.find(k)].push_back(k);
  std::vector<std::vector<int>> comp_rows_by_root(nact);
  for (size_t ri = 0; ri < red_rows.size(); ++ri)
    comp_rows_by_root[ds.find(red_rows[ri].row.coeffs[0].first)].push_back(static_cast<int>(ri));

  MilpStatus status = MilpStatus::optimal;
  for (int root = 0; root < nact; ++root) {
    if (comp_vars_by_root[root].empty()) continue;
    std::vector<int> rowset = comp_rows_by_root[root];
    MilpSolution cs = solve_component(reduced, cfg, comp_vars_by_root[root], rowset,
                                      reduced.lo(), reduced.hi(), deadline);
    total.nodes += cs.nodes;
    total.simplex_iterations += cs.simplex_iterations;
    total.hit_limit = total.hit_limit || cs.hit_limit;
    if (cs.status == MilpStatus::infeasible) return finish(MilpStatus::infeasible);
    if (cs.status == MilpStatus::iteration_limit) status = MilpStatus::iteration_limit;
    for (int k : comp_vars_by_root[root]) total.x[active_vars[k]] = cs.x[k];
    total.objective += cs.objective;
  }

  // Final feasibility audit against the original model.
  if (status == MilpStatus::optimal) {
    const double viol = model.max_violation(total.x);
    if (viol > 10 * cfg.tol_feas)
      status = MilpStatus::iteration_limit;  // numerically unsound; report honestly
  }
  return finish(status);
}

}  // namespace ikg
