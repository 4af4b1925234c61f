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

#ifndef IKG_LP_HPP
#define IKG_LP_HPP

#include <cstdint>
#include <vector>

#include "ikg/types.hpp"

namespace ikg {

// Bound magnitude used to clamp infinities; desk-scale models stay well below.
inline constexpr double kLpBoundClamp = 1e7;

enum class RowSense : char { le = 'L', ge = 'G', eq = 'E' };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // sorted by var index
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<double> obj;  // minimize
  std::vector<double> lo, hi;
  std::vector<LpRow> rows;

  int add_var(double lo_, double hi_, double obj_ = 0.0);
  void add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs);
};

enum class LpStatus { optimal, infeasible, iteration_limit };

// Basis snapshot: per-variable status (variables first, then row slacks).
struct LpBasis {
  std::vector<int32_t> basic_of_row;       // var index basic in each row
  std::vector<uint8_t> nonbasic_at_upper;  // for the rest
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  VecX x;  // structural variables only
  double objective = 0.0;
  long iterations = 0;
  LpBasis basis;
};

// Bounded-variable primal simplex with a dense basis inverse. Dantzig pricing
// with a Bland fallback after degenerate stalls guards against cycling.
LpResult solve_lp(const LpProblem& p, long iteration_limit = 0, const LpBasis* warm = nullptr);

}  // namespace ikg

#endif  // IKG_LP_HPP
