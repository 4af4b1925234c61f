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

#ifndef IKG_TYPES_HPP
#define IKG_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ikg {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Sparse vector as (index, value) pairs; indices strictly increasing.
struct SparseVec {
  std::vector<std::pair<int, double>> entries;

  void add(int idx, double v) {
    if (v == 0.0) return;
    for (auto& e : entries) {
      if (e.first == idx) {
        e.second += v;
        return;
      }
    }
    entries.emplace_back(idx, v);
  }
  double dot(const VecX& x) const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += v * x[i];
    return s;
  }
  void scatter_into(VecX& x, double scale = 1.0) const {
    for (const auto& [i, v] : entries) x[i] += scale * v;
  }
  bool empty() const { return entries.empty(); }
};

class IkgError : public std::runtime_error {
 public:
  enum class Kind { generic, infeasible, data_quality, limits, io };
  IkgError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

inline IkgError data_quality_error(const std::string& m) {
  return IkgError(IkgError::Kind::data_quality, m);
}
inline IkgError limits_error(const std::string& m) {
  return IkgError(IkgError::Kind::limits, m);
}

}  // namespace ikg

#endif  // IKG_TYPES_HPP
