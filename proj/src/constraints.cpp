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

#include "ikg/constraints.hpp"

#include <cmath>

namespace ikg {

namespace {

int pos_idx(const ScenarioSpec& s, int agent, int t, int c) {
  return flat_index(s, agent, t, VarKind::state, c);
}

double pos_of(const ScenarioSpec& s, const VecX& flat, int agent, int t, int c) {
  return flat[pos_idx(s, agent, t, c)];
}

int vel_idx(const ScenarioSpec& s, int agent, int t, int c) {
  return flat_index(s, agent, t, VarKind::state, velocity_state_offset(s, agent) + c);
}

// Enumerates one group per ordered pair and timestep.
std::vector<BlockRef> pairwise_blocks(const ScenarioSpec& s, int groups, int n_faces) {
  std::vector<BlockRef> out;
  for (int i = 0; i < s.num_agents(); ++i)
    for (int j = 0; j < s.num_agents(); ++j) {
      if (j == i) continue;
      for (int t = 0; t < s.horizon; ++t)
        for (int g = 0; g < groups; ++g) out.push_back({i, j, t, g, n_faces});
    }
  return out;
}

}  // namespace

int velocity_state_offset(const ScenarioSpec& spec, int agent) {
  const std::string& dyn = spec.agents[agent].dynamics;
  if (dyn == "double_int" || dyn == "unicycle_v") return spec.position_dim();
  if (dyn == "quadcopter") return 6;
  throw IkgError(IkgError::Kind::generic,
                 "dynamics '" + dyn + "' carries no velocity in the state");
}

std::string ConstraintFamily::lifted_name(int c) const {
  return kind_ + "_theta[" + std::to_string(c) + "]";
}

double EvaluatedConstraints::total_violation(int owner) const {
  // Group faces by block (faces of one block are contiguous in blocks order).
  double total = 0.0;
  size_t i = 0;
  while (i < faces.size()) {
    const BlockRef& b = faces[i].block;
    double block_min = faces[i].value;
    size_t j = i + 1;
    while (j < faces.size() && faces[j].block.owner == b.owner && faces[j].block.other == b.other &&
           faces[j].block.time == b.time && faces[j].block.group == b.group) {
      block_min = std::min(block_min, faces[j].value);
      ++j;
    }
    if (owner < 0 || b.owner == owner) total += std::max(block_min, 0.0);
    i = j;
  }
  return total;
}

double EvaluatedConstraints::worst_block() const {
  double worst = 0.0;
  size_t i = 0;
  while (i < faces.size()) {
    const BlockRef& b = faces[i].block;
    double block_min = faces[i].value;
    size_t j = i + 1;
    while (j < faces.size() && faces[j].block.owner == b.owner && faces[j].block.other == b.other &&
           faces[j].block.time == b.time && faces[j].block.group == b.group) {
      block_min = std::min(block_min, faces[j].value);
      ++j;
    }
    worst = std::max(worst, block_min);
    i = j;
  }
  return worst;
}

EvaluatedConstraints ConstraintFamily::eval(const VecX& flat_xi, const VecX& theta_natural,
                                            bool check_domain) const {
  if (check_domain && !theta_in_bounds(theta_natural))
    throw IkgError(IkgError::Kind::generic, kind_ + ": theta outside its bounds");
  const VecX tl = lift(theta_natural);
  EvaluatedConstraints out;
  for (const auto& b : blocks_) {
    for (int f = 0; f < b.n_faces; ++f) {
      FaceAffine fa = face_affine(flat_xi, b, f);
      EvaluatedFace ef;
      ef.block = b;
      ef.face = f;
      ef.value = fa.value(tl);
      ef.grad = fa.grad(tl);
      ef.active = std::abs(ef.value) <= kTolActive;
      out.faces.push_back(std::move(ef));
    }
  }
  return out;
}

void ConstraintFamily::theta_decomposition(const VecX& flat_xi, VecX& g0, MatX& g1) const {
  int rows = 0;
  for (const auto& b : blocks_) rows += b.n_faces;
  g0.resize(rows);
  g1.resize(rows, lifted_dim());
  int r = 0;
  for (const auto& b : blocks_) {
    for (int f = 0; f < b.n_faces; ++f) {
      FaceAffine fa = face_affine(flat_xi, b, f);
      g0[r] = fa.g0;
      g1.row(r) = fa.g1.transpose();
      ++r;
    }
  }
}

bool ConstraintFamily::theta_in_bounds(const VecX& theta_natural, double tol) const {
  if (theta_natural.size() != natural_dim()) return false;
  for (int c = 0; c < natural_dim(); ++c)
    if (theta_natural[c] < natural_bounds_[c].first - tol ||
        theta_natural[c] > natural_bounds_[c].second + tol)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Family implementations
// ---------------------------------------------------------------------------

namespace {

// Relative position difference p^j - p^i with sparse gradient helpers.
struct RelPos {
  VecX d;
  const ScenarioSpec* s;
  int i, j, t, pd;

  RelPos(const ScenarioSpec& spec, const VecX& flat, const BlockRef& b) : s(&spec) {
    i = b.owner;
    j = b.other;
    t = b.time;
    pd = spec.position_dim();
    d.resize(pd);
    for (int c = 0; c < pd; ++c)
      d[c] = pos_of(spec, flat, j, t, c) - pos_of(spec, flat, i, t, c);
  }
  // Adds w * dD[c]/dxi to the sparse gradient.
  void add_grad(SparseVec& g, int c, double w) const {
    g.add(pos_idx(*s, j, t, c), w);
    g.add(pos_idx(*s, i, t, c), -w);
  }
};

class SphericalFamily : public ConstraintFamily {
 public:
  SphericalFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "spherical") {
    natural_bounds_ = fam.theta_bounds;
    if (natural_dim() != spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "spherical: need one theta1 per agent");
    blocks_ = pairwise_blocks(spec, 1, 1);
  }
  std::string lifted_name(int c) const override { return "theta1[" + std::to_string(c) + "]"; }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    RelPos rp(spec(), flat, b);
    FaceAffine fa;
    fa.g0 = -rp.d.squaredNorm();
    fa.g1 = VecX::Zero(natural_dim());
    fa.g1[b.owner] = 1.0;
    for (int c = 0; c < rp.pd; ++c) rp.add_grad(fa.grad0, c, -2.0 * rp.d[c]);
    return fa;
  }
};

class ProximityFamily : public ConstraintFamily {
 public:
  ProximityFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "sphere_proximity") {
    natural_bounds_ = fam.theta_bounds;
    if (natural_dim() != 2 * spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "sphere_proximity: need (theta1, theta5) per agent");
    blocks_ = pairwise_blocks(spec, 2, 1);
  }
  std::string lifted_name(int c) const override {
    return (c % 2 == 0 ? "theta1[" : "theta5[") + std::to_string(c / 2) + "]";
  }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    RelPos rp(spec(), flat, b);
    FaceAffine fa;
    fa.g1 = VecX::Zero(natural_dim());
    if (b.group == 0) {  // collision avoidance: -|d|^2 + theta1 <= 0
      fa.g0 = -rp.d.squaredNorm();
      fa.g1[2 * b.owner] = 1.0;
      for (int c = 0; c < rp.pd; ++c) rp.add_grad(fa.grad0, c, -2.0 * rp.d[c]);
    } else {  // proximity: |d|^2 - theta5 <= 0
      fa.g0 = rp.d.squaredNorm();
      fa.g1[2 * b.owner + 1] = -1.0;
      for (int c = 0; c < rp.pd; ++c) rp.add_grad(fa.grad0, c, 2.0 * rp.d[c]);
    }
    return fa;
  }
};

class EllipticFamily : public ConstraintFamily {
 public:
  EllipticFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "elliptic"), shape_known_(fam.shape_known), shape_(fam.shape) {
    natural_bounds_ = fam.theta_bounds;
    const int pd = spec.position_dim();
    per_agent_ = shape_known_ ? 1 : pd;  // unknown shape: theta1 + (pd-1) axis weights,
                                         // last axis weight normalized to 1
    if (natural_dim() != per_agent_ * spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "elliptic: theta bounds length mismatch");
    if (shape_known_ && shape_.size() != pd)
      throw IkgError(IkgError::Kind::generic, "elliptic: known shape needs pd entries");
    offset_class_ = shape_known_;
    blocks_ = pairwise_blocks(spec, 1, 1);
  }
  std::string lifted_name(int c) const override {
    const int a = c / per_agent_, k = c % per_agent_;
    return "theta" + std::to_string(k + 1) + "[" + std::to_string(a) + "]";
  }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    RelPos rp(spec(), flat, b);
    FaceAffine fa;
    fa.g1 = VecX::Zero(natural_dim());
    const int base = per_agent_ * b.owner;
    fa.g1[base] = 1.0;  // + theta1
    if (shape_known_) {
      double q = 0.0;
      for (int c = 0; c < rp.pd; ++c) q += shape_[c] * rp.d[c] * rp.d[c];
      fa.g0 = -q;
      for (int c = 0; c < rp.pd; ++c) rp.add_grad(fa.grad0, c, -2.0 * shape_[c] * rp.d[c]);
    } else {
      // -(theta2 dx^2 + ... + 1 * d_last^2) + theta1, axis weights after theta1.
      fa.g0 = -rp.d[rp.pd - 1] * rp.d[rp.pd - 1];
      rp.add_grad(fa.grad0, rp.pd - 1, -2.0 * rp.d[rp.pd - 1]);
      fa.grad1.assign(natural_dim(), SparseVec{});
      for (int c = 0; c + 1 < rp.pd; ++c) {
        fa.g1[base + 1 + c] = -rp.d[c] * rp.d[c];
        rp.add_grad(fa.grad1[base + 1 + c], c, -2.0 * rp.d[c]);
      }
    }
    return fa;
  }

 private:
  bool shape_known_;
  VecX shape_;
  int per_agent_;
};

class PolytopicOffsetFamily : public ConstraintFamily {
 public:
  PolytopicOffsetFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "polytopic_offset"), normals_(fam.face_normals) {
    natural_bounds_ = fam.theta_bounds;
    if (normals_.rows() == 0 || normals_.cols() != spec.position_dim())
      throw IkgError(IkgError::Kind::generic, "polytopic_offset: face_normals required");
    if (natural_dim() != normals_.rows())
      throw IkgError(IkgError::Kind::generic, "polytopic_offset: one b per face required");
    blocks_ = pairwise_blocks(spec, 1, static_cast<int>(normals_.rows()));
  }
  std::string lifted_name(int c) const override { return "b[" + std::to_string(c) + "]"; }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int face) const override {
    RelPos rp(spec(), flat, b);
    FaceAffine fa;
    fa.g0 = normals_.row(face).dot(rp.d);
    fa.g1 = VecX::Zero(natural_dim());
    fa.g1[face] = -1.0;  // a_f . d - b_f <= 0
    for (int c = 0; c < rp.pd; ++c) rp.add_grad(fa.grad0, c, normals_(face, c));
    return fa;
  }

 private:
  MatX normals_;
};

class PolytopicAffineFamily : public ConstraintFamily {
 public:
  PolytopicAffineFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam, int n_faces)
      : ConstraintFamily(spec, "polytopic_affine"), n_faces_(n_faces) {
    natural_bounds_ = fam.theta_bounds;
    const int pd = spec.position_dim();
    if (natural_dim() != n_faces_ * (pd + 1))
      throw IkgError(IkgError::Kind::generic,
                     "polytopic_affine: theta layout is per face (normal coords, offset)");
    offset_class_ = false;
    blocks_ = pairwise_blocks(spec, 1, n_faces_);
  }
  std::string lifted_name(int c) const override {
    const int pd = spec().position_dim();
    const int f = c / (pd + 1), k = c % (pd + 1);
    if (k < pd) return "A[" + std::to_string(f) + "][" + std::to_string(k) + "]";
    return "b[" + std::to_string(f) + "]";
  }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int face) const override {
    RelPos rp(spec(), flat, b);
    const int pd = rp.pd;
    FaceAffine fa;
    fa.g0 = 0.0;
    fa.g1 = VecX::Zero(natural_dim());
    fa.grad1.assign(natural_dim(), SparseVec{});
    const int base = face * (pd + 1);
    for (int c = 0; c < pd; ++c) {
      fa.g1[base + c] = rp.d[c];  // a_{f,c} * d_c
      rp.add_grad(fa.grad1[base + c], c, 1.0);
    }
    fa.g1[base + pd] = -1.0;  // - b_f
    return fa;
  }

 private:
  int n_faces_;
};

class VelocitySphereFamily : public ConstraintFamily {
 public:
  VelocitySphereFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "velocity_sphere") {
    natural_bounds_ = fam.theta_bounds;
    if (natural_dim() != 2 * spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "velocity_sphere: need (theta1, theta6) per agent");
    offset_class_ = false;
    blocks_ = pairwise_blocks(spec, 1, 1);
  }
  int lifted_dim() const override { return 3 * spec().num_agents(); }
  VecX lift(const VecX& nat) const override {
    VecX tl(lifted_dim());
    for (int a = 0; a < spec().num_agents(); ++a) {
      tl[3 * a] = nat[2 * a];
      tl[3 * a + 1] = nat[2 * a + 1];
      tl[3 * a + 2] = nat[2 * a + 1] * nat[2 * a + 1];
    }
    return tl;
  }
  VecX natural_from_lifted(const VecX& tl) const override {
    VecX nat(natural_dim());
    for (int a = 0; a < spec().num_agents(); ++a) {
      nat[2 * a] = tl[3 * a];
      nat[2 * a + 1] = tl[3 * a + 1];
    }
    return nat;
  }
  double lift_consistency(const VecX& tl) const override {
    double worst = 0.0;
    for (int a = 0; a < spec().num_agents(); ++a)
      worst = std::max(worst, std::abs(tl[3 * a + 2] - tl[3 * a + 1] * tl[3 * a + 1]));
    return worst;
  }
  std::string lifted_name(int c) const override {
    static const char* names[3] = {"theta1[", "theta6[", "theta6_sq["};
    return std::string(names[c % 3]) + std::to_string(c / 3) + "]";
  }
  std::vector<std::pair<double, double>> lifted_bounds() const override {
    std::vector<std::pair<double, double>> lb;
    for (int a = 0; a < spec().num_agents(); ++a) {
      lb.push_back(natural_bounds_[2 * a]);
      const auto [lo, hi] = natural_bounds_[2 * a + 1];
      lb.push_back({lo, hi});
      double sq_lo = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
      double sq_hi = std::max(lo * lo, hi * hi);
      lb.push_back({sq_lo, sq_hi});
    }
    return lb;
  }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    const ScenarioSpec& s = spec();
    RelPos rp(s, flat, b);
    const int pd = rp.pd;
    VecX dv(pd);
    for (int c = 0; c < pd; ++c)
      dv[c] = flat[vel_idx(s, b.other, b.time, c)] - flat[vel_idx(s, b.owner, b.time, c)];
    FaceAffine fa;
    // -|dp|^2 + theta1 - 2 (dp.dv) theta6 - |dv|^2 theta6_sq
    fa.g0 = -rp.d.squaredNorm();
    fa.g1 = VecX::Zero(lifted_dim());
    fa.g1[3 * b.owner] = 1.0;
    fa.g1[3 * b.owner + 1] = -2.0 * rp.d.dot(dv);
    fa.g1[3 * b.owner + 2] = -dv.squaredNorm();
    for (int c = 0; c < pd; ++c) rp.add_grad(fa.grad0, c, -2.0 * rp.d[c]);
    fa.grad1.assign(lifted_dim(), SparseVec{});
    SparseVec& g6 = fa.grad1[3 * b.owner + 1];
    SparseVec& g6s = fa.grad1[3 * b.owner + 2];
    for (int c = 0; c < pd; ++c) {
      rp.add_grad(g6, c, -2.0 * dv[c]);  // d/dp of -2 (dp.dv)
      g6.add(vel_idx(s, b.other, b.time, c), -2.0 * rp.d[c]);
      g6.add(vel_idx(s, b.owner, b.time, c), 2.0 * rp.d[c]);
      g6s.add(vel_idx(s, b.other, b.time, c), -2.0 * dv[c]);
      g6s.add(vel_idx(s, b.owner, b.time, c), 2.0 * dv[c]);
    }
    return fa;
  }
};

class LineOfSightFamily : public ConstraintFamily {
 public:
  LineOfSightFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "line_of_sight") {
    natural_bounds_ = fam.theta_bounds;
    if (natural_dim() != spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "line_of_sight: need one theta7 per agent");
    if (spec.position_dim() != 2)
      throw IkgError(IkgError::Kind::generic, "line_of_sight: 2-D agents only");
    offset_class_ = false;
    blocks_ = pairwise_blocks(spec, 2, 1);
  }
  std::string lifted_name(int c) const override { return "theta7[" + std::to_string(c) + "]"; }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    const ScenarioSpec& s = spec();
    RelPos rp(s, flat, b);
    const int ivx = vel_idx(s, b.owner, b.time, 0), ivy = vel_idx(s, b.owner, b.time, 1);
    const double vx = flat[ivx], vy = flat[ivy];
    const double sgn = (b.group == 0) ? 1.0 : -1.0;
    // Half-space written g <= 0:  -(sgn*(dx vy - dy vx) + (dx vx + dy vy) theta7) <= 0.
    FaceAffine fa;
    fa.g0 = -sgn * (rp.d[0] * vy - rp.d[1] * vx);
    fa.g1 = VecX::Zero(natural_dim());
    fa.g1[b.owner] = -(rp.d[0] * vx + rp.d[1] * vy);
    rp.add_grad(fa.grad0, 0, -sgn * vy);
    rp.add_grad(fa.grad0, 1, sgn * vx);
    fa.grad0.add(ivy, -sgn * rp.d[0]);
    fa.grad0.add(ivx, sgn * rp.d[1]);
    fa.grad1.assign(natural_dim(), SparseVec{});
    SparseVec& g7 = fa.grad1[b.owner];
    rp.add_grad(g7, 0, -vx);
    rp.add_grad(g7, 1, -vy);
    g7.add(ivx, -rp.d[0]);
    g7.add(ivy, -rp.d[1]);
    return fa;
  }
};

// Quartic relative-position constraint with an unknown offset per agent.
class CustomOffsetFamily : public ConstraintFamily {
 public:
  CustomOffsetFamily(const ScenarioSpec& spec, const UnknownFamilySpec& fam)
      : ConstraintFamily(spec, "custom_offset") {
    natural_bounds_ = fam.theta_bounds;
    if (natural_dim() != spec.num_agents())
      throw IkgError(IkgError::Kind::generic, "custom_offset: need one theta8 per agent");
    if (spec.position_dim() != 2)
      throw IkgError(IkgError::Kind::generic, "custom_offset: 2-D agents only");
    blocks_ = pairwise_blocks(spec, 1, 1);
  }
  std::string lifted_name(int c) const override { return "theta8[" + std::to_string(c) + "]"; }
  FaceAffine face_affine(const VecX& flat, const BlockRef& b, int) const override {
    RelPos rp(spec(), flat, b);
    const double dx = rp.d[0], dy = rp.d[1];
    FaceAffine fa;
    fa.g0 = 2 * std::pow(dx, 4) + 2 * std::pow(dy, 4) - 5 * std::pow(dx, 3) -
            5 * std::pow(dy, 3) + 5 * std::pow(dx - 1, 3) + 5 * std::pow(dy + 1, 3);
    fa.g1 = VecX::Zero(natural_dim());
    fa.g1[b.owner] = -1.0;
    rp.add_grad(fa.grad0, 0, 8 * std::pow(dx, 3) - 15 * dx * dx + 15 * std::pow(dx - 1, 2));
    rp.add_grad(fa.grad0, 1, 8 * std::pow(dy, 3) - 15 * dy * dy + 15 * std::pow(dy + 1, 2));
    return fa;
  }
};

std::unique_ptr<ConstraintFamily> build(const ScenarioSpec& spec, const UnknownFamilySpec& fam) {
  const std::string& k = fam.kind;
  if (k == "spherical") return std::make_unique<SphericalFamily>(spec, fam);
  if (k == "sphere_proximity") return std::make_unique<ProximityFamily>(spec, fam);
  if (k == "elliptic") return std::make_unique<EllipticFamily>(spec, fam);
  if (k == "polytopic_offset") return std::make_unique<PolytopicOffsetFamily>(spec, fam);
  if (k == "polytopic_affine") {
    const int pd = spec.position_dim();
    const int n_faces = static_cast<int>(fam.theta_bounds.size()) / (pd + 1);
    return std::make_unique<PolytopicAffineFamily>(spec, fam, n_faces);
  }
  if (k == "velocity_sphere") return std::make_unique<VelocitySphereFamily>(spec, fam);
  if (k == "line_of_sight") return std::make_unique<LineOfSightFamily>(spec, fam);
  if (k == "custom_offset") return std::make_unique<CustomOffsetFamily>(spec, fam);
  throw IkgError(IkgError::Kind::generic, "unknown constraint family kind: " + k);
}

}  // namespace

std::unique_ptr<ConstraintFamily> make_family(const ScenarioSpec& spec) {
  return build(spec, spec.unknown_family);
}

std::unique_ptr<ConstraintFamily> make_known_family(const ScenarioSpec& spec,
                                                    const KnownConstraint& k) {
  UnknownFamilySpec fam;
  fam.kind = k.kind;
  fam.face_normals = k.face_normals;
  fam.shape_known = k.shape_known;
  fam.shape = k.shape;
  for (int c = 0; c < k.theta.size(); ++c) fam.theta_bounds.emplace_back(k.theta[c], k.theta[c]);
  return build(spec, fam);
}

std::vector<EqualityPin> boundary_constraints(const ScenarioSpec& spec) {
  std::vector<EqualityPin> pins;
  const int pd = spec.position_dim();
  const int T = spec.horizon;
  for (int i = 0; i < spec.num_agents(); ++i) {
    for (int c = 0; c < pd; ++c) pins.push_back({i, 0, false, c, spec.boundary.origins[i][c]});
    if (spec.boundary.init_vel)
      for (int c = 0; c < pd; ++c) pins.push_back({i, 0, true, c, (*spec.boundary.init_vel)[i][c]});
    for (int c = 0; c < pd; ++c) pins.push_back({i, T - 1, false, c, spec.boundary.goals[i][c]});
    if (spec.boundary.final_vel)
      for (int c = 0; c < pd; ++c)
        pins.push_back({i, T - 1, true, c, (*spec.boundary.final_vel)[i][c]});
  }
  return pins;
}

int pin_flat_index(const ScenarioSpec& spec, const EqualityPin& pin) {
  const int off = pin.velocity ? velocity_state_offset(spec, pin.agent) : 0;
  return flat_index(spec, pin.agent, pin.time, VarKind::state, off + pin.coord);
}

}  // namespace ikg
