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

#ifndef IKG_MILP_HPP
#define IKG_MILP_HPP

#include <string>
#include <vector>

#include "ikg/lp.hpp"
#include "ikg/types.hpp"

namespace ikg {

struct MilpConfig {
  double time_limit = 120.0;  // seconds
  long node_limit = 2000000;
  double tol_int = 1e-6;
  double tol_feas = 1e-7;
  double big_m = 1e4;
  double m_lower = -1e3;  // slack bounds for linearized bilinear terms
  double m_upper = 1e3;
  bool presolve = true;
};

class MilpModel {
 public:
  int add_continuous(const std::string& name, double lo, double hi, double obj = 0.0);
  int add_binary(const std::string& name, double obj = 0.0);
  int add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs,
              const std::string& name = "");

  int num_vars() const { return static_cast<int>(lo_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;

  // Encodes "at least one of rows holds", each row meaning coeffs.x >= rhs,
  // through one selector binary per row plus a cover row. Returns the binaries.
  std::vector<int> add_disjunction_bigM(const std::vector<LpRow>& ge_rows,
                                        const std::string& selector_name, double big_m);

  // Adds r with r = q * ell in every integral-feasible solution, via the
  // bound envelope on [m_lower, m_upper]. ell must carry finite bounds inside
  // that interval.
  int linearize_binary_product(int q, int ell, double m_lower, double m_upper,
                               const std::string& name);

  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  void set_bounds(int var, double lo, double hi);
  double objective_coeff(int var) const { return obj_[var]; }
  void set_objective_coeff(int var, double c);
  void clear_objective();
  bool is_binary(int var) const { return binary_[var]; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::string& var_name(int v) const { return var_names_[v]; }
  const std::string& row_name(int r) const { return row_names_[r]; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(const std::string& w) { warnings_.push_back(w); }

  // Interval-arithmetic activity range of a row over the variable box.
  std::pair<double, double> row_activity_range(const LpRow& row) const;
  // Max violation of row over the box; 0 when the row always holds.
  double row_box_violation(const LpRow& row) const;

  double eval_row(const LpRow& row, const VecX& x) const;
  // Largest constraint violation of x over all rows.
  double max_violation(const VecX& x) const;

 private:
  std::vector<double> lo_, hi_, obj_;
  std::vector<uint8_t> binary_;
  std::vector<std::string> var_names_, row_names_;
  std::vector<LpRow> rows_;
  std::vector<std::string> warnings_;
};

enum class MilpStatus { optimal, infeasible, iteration_limit };

struct MilpSolution {
  MilpStatus status = MilpStatus::infeasible;
  VecX x;
  double objective = 0.0;
  long nodes = 0;
  long simplex_iterations = 0;
  double wall_time = 0.0;
  bool hit_limit = false;
};

MilpSolution solve_milp(const MilpModel& model, const MilpConfig& config);

}  // namespace ikg

#endif  // IKG_MILP_HPP
