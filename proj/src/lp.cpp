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

#include "ikg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ikg {

namespace {

constexpr double kTolPivot = 1e-10;
constexpr double kTolRc = 1e-9;
constexpr double kTolFeas = 1e-9;
constexpr int kDegenerateStreakForBland = 40;

enum VarState : uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

struct Simplex {
  int m = 0;     // rows
  int n = 0;     // structural vars
  int ntot = 0;  // n + m (slacks appended)

  // Sparse columns (structural only; slack j has implicit column e_{j-n}).
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> lo, hi, cost;
  VecX rhs;

  std::vector<int32_t> basic;   // var basic in row r
  std::vector<int32_t> row_of;  // inverse map, -1 if nonbasic
  std::vector<uint8_t> state;
  MatX binv;
  VecX xb;

  long iters = 0;

  double bound_value(int j) const { return state[j] == kAtUpper ? hi[j] : lo[j]; }

  VecX col_dense(int j) const {
    VecX a = VecX::Zero(m);
    if (j >= n) {
      a[j - n] = 1.0;
    } else {
      for (const auto& [r, v] : cols[j]) a[r] += v;
    }
    return a;
  }

  double col_dot(int j, const VecX& y) const {
    if (j >= n) return y[j - n];
    double s = 0.0;
    for (const auto& [r, v] : cols[j]) s += y[r] * v;
    return s;
  }

  void refresh_binv() {
    MatX B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = col_dense(basic[r]);
    Eigen::FullPivLU<MatX> lu(B);
    if (!lu.isInvertible()) {
      // Degenerate warm basis: fall back to the all-slack basis.
      for (int j = 0; j < ntot; ++j)
        if (state[j] == kBasic) state[j] = kAtLower;
      for (int r = 0; r < m; ++r) {
        basic[r] = n + r;
        state[n + r] = kBasic;
      }
      std::fill(row_of.begin(), row_of.end(), -1);
      for (int r = 0; r < m; ++r) row_of[n + r] = r;
      binv = MatX::Identity(m, m);
      return;
    }
    binv = lu.inverse();
  }

  void refresh_xb() {
    VecX r = rhs;
    for (int j = 0; j < ntot; ++j) {
      if (state[j] == kBasic) continue;
      const double v = bound_value(j);
      if (v == 0.0) continue;
      if (j >= n) {
        r[j - n] -= v;
      } else {
        for (const auto& [row, a] : cols[j]) r[row] -= a * v;
      }
    }
    xb = binv * r;
  }

  // Phase-1 infeasibility measure over basic variables.
  double infeasibility(VecX* d_out = nullptr) const {
    double phi = 0.0;
    if (d_out) d_out->setZero(m);
    for (int r = 0; r < m; ++r) {
      const int j = basic[r];
      if (xb[r] > hi[j] + kTolFeas) {
        phi += xb[r] - hi[j];
        if (d_out) (*d_out)[r] = 1.0;
      } else if (xb[r] < lo[j] - kTolFeas) {
        phi += lo[j] - xb[r];
        if (d_out) (*d_out)[r] = -1.0;
      }
    }
    return phi;
  }

  LpStatus run(long iter_limit) {
    int degenerate_streak = 0;
    refresh_xb();
    long since_refresh = 0;
    while (true) {
      if (iter_limit > 0 && iters >= iter_limit) return LpStatus::iteration_limit;
      if (since_refresh > 400) {
        refresh_binv();
        refresh_xb();
        since_refresh = 0;
      }

      VecX d(m);
      const double phi = infeasibility(&d);
      const bool phase1 = phi > kTolFeas;

      // Dual vector for pricing.
      VecX y;
      if (phase1) {
        y = binv.transpose() * d;
      } else {
        VecX cb(m);
        for (int r = 0; r < m; ++r) cb[r] = cost[basic[r]];
        y = binv.transpose() * cb;
      }

      const bool bland = degenerate_streak > kDegenerateStreakForBland;
      int enter = -1;
      double best_score = kTolRc;
      int enter_dir = +1;  // +1: increase from lower, -1: decrease from upper
      for (int j = 0; j < ntot; ++j) {
        if (state[j] == kBasic) continue;
        if (lo[j] == hi[j]) continue;  // fixed
        double rc = phase1 ? -col_dot(j, y) : cost[j] - col_dot(j, y);
        if (state[j] == kAtLower && rc < -best_score) {
          enter = j;
          enter_dir = +1;
          if (bland) break;
          best_score = -rc;
        } else if (state[j] == kAtUpper && rc > best_score) {
          enter = j;
          enter_dir = -1;
          if (bland) break;
          best_score = rc;
        }
      }
      if (enter < 0) return phase1 ? LpStatus::infeasible : LpStatus::optimal;

      const VecX w = binv * col_dense(enter);
      // xb(delta) = xb - enter_dir * delta * w
      double delta = hi[enter] - lo[enter];
      int leave_row = -1;
      double leave_bound = 0.0;
      for (int r = 0; r < m; ++r) {
        const double g = -enter_dir * w[r];
        if (std::abs(g) < kTolPivot) continue;
        const int jb = basic[r];
        double cand = std::numeric_limits<double>::infinity();
        double bound = 0.0;
        if (xb[r] > hi[jb] + kTolFeas) {
          // Infeasible above: blocks only when moving down to hi.
          if (g < 0) {
            cand = (hi[jb] - xb[r]) / g;
            bound = hi[jb];
          }
        } else if (xb[r] < lo[jb] - kTolFeas) {
          if (g > 0) {
            cand = (lo[jb] - xb[r]) / g;
            bound = lo[jb];
          }
        } else {
          if (g > 0) {
            cand = (hi[jb] - xb[r]) / g;
            bound = hi[jb];
          } else {
            cand = (lo[jb] - xb[r]) / g;
            bound = lo[jb];
          }
        }
        if (cand < -kTolFeas) cand = 0.0;
        cand = std::max(cand, 0.0);
        if (cand < delta - kTolPivot ||
            (cand < delta + kTolPivot && leave_row >= 0 && basic[r] < basic[leave_row])) {
          delta = cand;
          leave_row = r;
          leave_bound = bound;
        }
      }

      ++iters;
      ++since_refresh;
      degenerate_streak = (delta < kTolFeas) ? degenerate_streak + 1 : 0;

      if (leave_row < 0) {
        // Bound flip; no basis change.
        xb -= enter_dir * delta * w;
        state[enter] = (enter_dir > 0) ? kAtUpper : kAtLower;
        continue;
      }

      const int leave = basic[leave_row];
      xb -= enter_dir * delta * w;
      // Entering variable's new value.
      const double enter_val = bound_value(enter) + enter_dir * delta;
      // Pivot: eta update of binv.
      const double piv = w[leave_row];
      binv.row(leave_row) /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == leave_row) continue;
        const double f = w[r];
        if (f != 0.0) binv.row(r) -= f * binv.row(leave_row);
      }
      basic[leave_row] = enter;
      row_of[enter] = leave_row;
      row_of[leave] = -1;
      state[enter] = kBasic;
      state[leave] = (std::abs(leave_bound - hi[leave]) < std::abs(leave_bound - lo[leave]))
                         ? kAtUpper
                         : kAtLower;
      xb[leave_row] = enter_val;
    }
  }
};

}  // namespace

int LpProblem::add_var(double lo_, double hi_, double obj_) {
  lo.push_back(std::max(lo_, -kLpBoundClamp));
  hi.push_back(std::min(hi_, kLpBoundClamp));
  obj.push_back(obj_);
  return num_vars++;
}

void LpProblem::add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
  std::sort(coeffs.begin(), coeffs.end());
  rows.push_back({std::move(coeffs), sense, rhs});
}

LpResult solve_lp(const LpProblem& p, long iteration_limit, const LpBasis* warm) {
  Simplex s;
  s.m = static_cast<int>(p.rows.size());
  s.n = p.num_vars;
  s.ntot = s.n + s.m;
  s.cols.assign(s.n, {});
  s.lo = p.lo;
  s.hi = p.hi;
  s.cost = p.obj;
  s.rhs.resize(s.m);
  for (int r = 0; r < s.m; ++r) {
    const LpRow& row = p.rows[r];
    s.rhs[r] = row.rhs;
    for (const auto& [j, v] : row.coeffs) s.cols[j].emplace_back(r, v);
    // Slack bounds by sense:  a.x + s = rhs.
    switch (row.sense) {
      case RowSense::le:
        s.lo.push_back(0.0);
        s.hi.push_back(2 * kLpBoundClamp);
        break;
      case RowSense::ge:
        s.lo.push_back(-2 * kLpBoundClamp);
        s.hi.push_back(0.0);
        break;
      case RowSense::eq:
        s.lo.push_back(0.0);
        s.hi.push_back(0.0);
        break;
    }
    s.cost.push_back(0.0);
  }

  s.state.assign(s.ntot, kAtLower);
  s.basic.assign(s.m, 0);
  s.row_of.assign(s.ntot, -1);
  bool warm_ok = false;
  if (warm && static_cast<int>(warm->basic_of_row.size()) == s.m &&
      static_cast<int>(warm->nonbasic_at_upper.size()) == s.ntot) {
    warm_ok = true;
    std::vector<uint8_t> seen(s.ntot, 0);
    for (int r = 0; r < s.m; ++r) {
      const int j = warm->basic_of_row[r];
      if (j < 0 || j >= s.ntot || seen[j]) {
        warm_ok = false;
        break;
      }
      seen[j] = 1;
    }
    if (warm_ok) {
      for (int j = 0; j < s.ntot; ++j)
        s.state[j] = warm->nonbasic_at_upper[j] ? kAtUpper : kAtLower;
      for (int r = 0; r < s.m; ++r) {
        s.basic[r] = warm->basic_of_row[r];
        s.state[s.basic[r]] = kBasic;
        s.row_of[s.basic[r]] = r;
      }
      s.refresh_binv();
    }
  }
  if (!warm_ok) {
    for (int r = 0; r < s.m; ++r) {
      s.basic[r] = s.n + r;
      s.state[s.n + r] = kBasic;
      s.row_of[s.n + r] = r;
    }
    // Start nonbasic vars at the bound closest to zero.
    for (int j = 0; j < s.n; ++j)
      if (s.lo[j] <= 0.0 && s.hi[j] >= 0.0)
        s.state[j] = (s.lo[j] == 0.0 || -s.lo[j] <= s.hi[j]) ? kAtLower : kAtUpper;
      else
        s.state[j] = (std::abs(s.lo[j]) <= std::abs(s.hi[j])) ? kAtLower : kAtUpper;
    s.binv = MatX::Identity(s.m, s.m);
  }

  if (iteration_limit <= 0) iteration_limit = 20000 + 60L * s.m;
  const LpStatus st = s.run(iteration_limit);

  LpResult res;
  res.status = st;
  res.iterations = s.iters;
  res.x = VecX::Zero(s.n);
  s.refresh_binv();
  s.refresh_xb();
  for (int j = 0; j < s.n; ++j)
    if (s.state[j] != kBasic) res.x[j] = s.bound_value(j);
  for (int r = 0; r < s.m; ++r)
    if (s.basic[r] < s.n) res.x[s.basic[r]] = s.xb[r];
  res.objective = 0.0;
  for (int j = 0; j < s.n; ++j) res.objective += p.obj[j] * res.x[j];
  res.basis.basic_of_row.assign(s.basic.begin(), s.basic.end());
  res.basis.nonbasic_at_upper.assign(s.ntot, 0);
  for (int j = 0; j < s.ntot; ++j) res.basis.nonbasic_at_upper[j] = (s.state[j] == kAtUpper);
  return res;
}

}  // namespace ikg
