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

#ifndef IKG_CONSTRAINTS_HPP
#define IKG_CONSTRAINTS_HPP

#include <memory>
#include <string>
#include <vector>

#include "ikg/core_model.hpp"
#include "ikg/types.hpp"

namespace ikg {

inline constexpr double kTolActive = 1e-6;
inline constexpr double kEpsStrict = 1e-4;  // closed-form stand-in for strict inequalities

// One disjunctive block instance: the constraint on (owner, other, time)
// holds iff at least one of its faces evaluates <= 0. Conjunctive families
// (proximity bounds, line-of-sight half-spaces) expose one group per scalar.
struct BlockRef {
  int owner = 0;
  int other = 0;
  int time = 0;
  int group = 0;
  int n_faces = 1;
};

// Affine-in-theta view of one scalar face at a fixed trajectory point:
//   value(theta)    = g0 + g1 . theta
//   grad_xi(theta)  = grad0 + sum_c theta_c * grad1[c]
// All thetas here are in the family's lifted coordinates.
struct FaceAffine {
  double g0 = 0.0;
  VecX g1;
  SparseVec grad0;
  std::vector<SparseVec> grad1;  // empty vectors for offset-class families

  double value(const VecX& theta_lifted) const { return g0 + g1.dot(theta_lifted); }
  SparseVec grad(const VecX& theta_lifted) const {
    SparseVec g = grad0;
    for (size_t c = 0; c < grad1.size(); ++c)
      for (const auto& [i, v] : grad1[c].entries) g.add(i, theta_lifted[static_cast<int>(c)] * v);
    return g;
  }
  bool grad_depends_on_theta() const {
    for (const auto& s : grad1)
      if (!s.empty()) return true;
    return false;
  }
};

struct EvaluatedFace {
  BlockRef block;
  int face = 0;
  double value = 0.0;
  SparseVec grad;
  bool active = false;  // |value| <= kTolActive
};

struct EvaluatedConstraints {
  std::vector<EvaluatedFace> faces;

  // Violation of one block = max(0, min over its faces); a block is satisfied
  // iff some face value is <= 0.
  double total_violation(int owner = -1) const;
  double max_violation() const { return total_violation(-1) > 0 ? worst_block() : 0.0; }
  double worst_block() const;
};

class ConstraintFamily {
 public:
  virtual ~ConstraintFamily() = default;

  const std::string& kind() const { return kind_; }
  int natural_dim() const { return static_cast<int>(natural_bounds_.size()); }
  virtual int lifted_dim() const { return natural_dim(); }
  virtual VecX lift(const VecX& theta_natural) const { return theta_natural; }
  virtual VecX natural_from_lifted(const VecX& theta_lifted) const { return theta_lifted; }
  // Consistency defect of a lifted point (e.g. |t6sq - t6^2|); 0 when exact.
  virtual double lift_consistency(const VecX& theta_lifted) const {
    (void)theta_lifted;
    return 0.0;
  }
  virtual std::string lifted_name(int c) const;

  const std::vector<std::pair<double, double>>& natural_bounds() const { return natural_bounds_; }
  virtual std::vector<std::pair<double, double>> lifted_bounds() const { return natural_bounds_; }

  const std::vector<BlockRef>& blocks() const { return blocks_; }
  // True when grad_xi is structurally independent of theta (exact MILP path).
  bool offset_class() const { return offset_class_; }

  virtual FaceAffine face_affine(const VecX& flat_xi, const BlockRef& block, int face) const = 0;

  // Spec-facing operations -------------------------------------------------

  // Every scalar face value/gradient/active flag at natural theta.
  EvaluatedConstraints eval(const VecX& flat_xi, const VecX& theta_natural,
                            bool check_domain = true) const;
  // Exact decomposition g(xi, .) = G0(xi) + G1(xi) . theta_lifted, stacked
  // over all faces of all blocks in blocks() order.
  void theta_decomposition(const VecX& flat_xi, VecX& g0, MatX& g1) const;

  bool theta_in_bounds(const VecX& theta_natural, double tol = 1e-9) const;

 protected:
  ConstraintFamily(const ScenarioSpec& spec, std::string kind)
      : kind_(std::move(kind)), spec_(&spec) {}
  const ScenarioSpec& spec() const { return *spec_; }

  std::string kind_;
  const ScenarioSpec* spec_;
  std::vector<std::pair<double, double>> natural_bounds_;
  std::vector<BlockRef> blocks_;
  bool offset_class_ = true;
};

// Builds the family described by the scenario's unknown_family.
std::unique_ptr<ConstraintFamily> make_family(const ScenarioSpec& spec);
// Builds a family object for a known constraint (frozen theta kept separately).
std::unique_ptr<ConstraintFamily> make_known_family(const ScenarioSpec& spec,
                                                    const KnownConstraint& k);

// Known equality pins from the boundary block of the scenario.
struct EqualityPin {
  int agent;
  int time;
  bool velocity;  // false: position coordinate
  int coord;
  double value;
};
std::vector<EqualityPin> boundary_constraints(const ScenarioSpec& spec);
int velocity_state_offset(const ScenarioSpec& spec, int agent);
int pin_flat_index(const ScenarioSpec& spec, const EqualityPin& pin);

}  // namespace ikg

#endif  // IKG_CONSTRAINTS_HPP
