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

#ifndef IKG_INVERSE_KKT_HPP
#define IKG_INVERSE_KKT_HPP

#include <optional>
#include <string>
#include <vector>

#include "ikg/constraints.hpp"
#include "ikg/core_model.hpp"
#include "ikg/forward_game.hpp"
#include "ikg/json_io.hpp"
#include "ikg/milp.hpp"

namespace ikg {

enum class EncodeMode { exact_offset, relaxed_affine, stationarity_min };

struct InverseOptions {
  EncodeMode mode = EncodeMode::exact_offset;
  MilpConfig milp;
  bool joint_cost = false;  // also recover unknown cost mix weights
  std::pair<double, double> cost_weight_bounds = {0.0, 10.0};
  double recert_tol = 1e-5;
  double recert_active_tol = 1e-4;
  bool compute_intervals = true;
  bool tolerate_infeasible_demos = false;  // forced on for stationarity_min
};

struct InferenceResult {
  std::string status;  // feasible | infeasible | limit
  VecX theta;          // natural coordinates (midpoint policy)
  VecX theta_lifted;
  std::vector<std::pair<double, double>> theta_interval;  // lifted coords
  std::vector<bool> identified;                           // interval width <= 2e-3
  VecX cost_weights;                                      // joint mode
  double stationarity_error = 0.0;                        // Eq-6 style objective
  double recert_residual_l1 = 0.0;
  bool recertified = false;
  MilpSolution stats;
  std::vector<std::string> notes;
};

// Identifies one unknown face inside the encoder's variable table.
struct FaceVarIds {
  int lambda = -1;
  int z = -1, zh1 = -1, zh2 = -1, q = -1, qt = -1;
  std::vector<int> grad_coords;  // owner-slice flat coords with L/r entries
  std::vector<int> L, r;
};

class InverseKkt {
 public:
  InverseKkt(const ScenarioSpec& spec, const DemonstrationSet& demos, InverseOptions opt);

  const MilpModel& model() const { return model_; }
  MilpModel model_copy() const { return model_; }
  const ConstraintFamily& family() const { return *family_; }
  int theta_var(int lifted_coord) const { return theta_vars_[lifted_coord]; }
  const std::vector<int>& theta_vars() const { return theta_vars_; }
  const std::vector<int>& cost_weight_vars() const { return cost_weight_vars_; }
  long binary_count() const;
  const FaceVarIds& face_vars(int demo, int block_idx, int face) const;

  InferenceResult infer();
  InferenceResult infer_suboptimal();

  // [min, max] of one lifted coordinate over the encoded feasible set.
  std::pair<double, double> theta_interval(int lifted_coord, bool* limit_hit = nullptr) const;

  // Full MILP assignment from a generating certificate; used to verify that
  // the ground truth satisfies every encoded row.
  VecX assignment_from_certificate(const VecX& theta_natural, const KktCertificate& cert) const;

  // Nonnegative-least-squares re-certification of theta against the demos.
  double recertify(const VecX& theta_natural, KktCertificate* cert_out = nullptr) const;

 private:
  void encode();
  void data_quality_check() const;

  const ScenarioSpec& spec_;
  const DemonstrationSet& demos_;
  InverseOptions opt_;
  std::unique_ptr<ConstraintFamily> family_;
  std::vector<std::unique_ptr<ConstraintFamily>> known_;
  std::vector<VecX> known_lifted_;

  MilpModel model_;
  std::vector<int> theta_vars_;
  std::vector<int> cost_weight_vars_;
  // [demo][block][face]
  std::vector<std::vector<std::vector<FaceVarIds>>> face_vars_;
  // [demo][agent] -> equality dual var ids
  std::vector<std::vector<std::vector<int>>> nu_vars_;
  // [demo][agent] -> (known family idx, face counter, var id)
  struct KnownLambda {
    int known_idx;
    int flat_face;  // dense index over that agent's faces of that known family
    int var;
    SparseVec grad;
  };
  std::vector<std::vector<std::vector<KnownLambda>>> known_lambda_vars_;
  // stationarity slack vars (stationarity_min mode): [demo][agent] coords
  std::vector<int> slack_vars_;
};

Json inference_result_to_json(const InferenceResult& r);

// Solves min/max of a linear functional of theta over the encoded set.
double optimize_theta_direction(const InverseKkt& enc, const VecX& direction, bool maximize,
                                const MilpConfig& cfg, bool* ok = nullptr);

}  // namespace ikg

#endif  // IKG_INVERSE_KKT_HPP
