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

#include "ikg/json_io.hpp"

#include <fstream>
#include <sstream>

namespace ikg {

namespace {

Json vec_to_json(const VecX& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

VecX vec_from_json(const Json& a) {
  VecX v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

Json mat_to_json(const MatX& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

MatX mat_from_json(const Json& rows) {
  if (rows.empty()) return MatX();
  MatX m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c].get<double>();
  return m;
}

}  // namespace

Json scenario_to_json(const ScenarioSpec& spec) {
  Json j;
  j["version"] = spec.version;
  if (!spec.name.empty()) j["name"] = spec.name;
  Json agents = Json::array();
  for (size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& a = spec.agents[i];
    Json ja = {{"state_dim", a.state_dim},
               {"control_dim", a.control_dim},
               {"dynamics", a.dynamics},
               {"cost", a.cost}};
    if (i < spec.cost_params.size()) {
      const auto& cp = spec.cost_params[i];
      if (cp.control_weight != 1.0 || cp.y_weight != 0.0 || cp.mix_weight != 1.0) {
        ja["cost_params"] = {{"control_weight", cp.control_weight},
                             {"y_weight", cp.y_weight},
                             {"mix_weight", cp.mix_weight}};
      }
    }
    agents.push_back(ja);
  }
  j["agents"] = agents;
  j["horizon"] = spec.horizon;
  j["dt"] = spec.dt;

  Json known = Json::array();
  for (const auto& k : spec.known_constraints) {
    Json jk = {{"kind", k.kind}, {"theta", vec_to_json(k.theta)}};
    if (k.face_normals.size() > 0) jk["face_normals"] = mat_to_json(k.face_normals);
    if (!k.shape_known) jk["shape_known"] = false;
    if (k.shape.size() > 0) jk["shape"] = vec_to_json(k.shape);
    known.push_back(jk);
  }
  j["known_constraints"] = known;

  Json fam;
  fam["kind"] = spec.unknown_family.kind;
  Json tb = Json::array();
  for (const auto& [lo, hi] : spec.unknown_family.theta_bounds) tb.push_back(Json::array({lo, hi}));
  fam["theta_bounds"] = tb;
  if (spec.unknown_family.face_normals.size() > 0)
    fam["face_normals"] = mat_to_json(spec.unknown_family.face_normals);
  if (!spec.unknown_family.shape_known) fam["shape_known"] = false;
  if (spec.unknown_family.shape.size() > 0) fam["shape"] = vec_to_json(spec.unknown_family.shape);
  j["unknown_family"] = fam;

  Json b;
  Json origins = Json::array(), goals = Json::array();
  for (const auto& p : spec.boundary.origins) origins.push_back(vec_to_json(p));
  for (const auto& p : spec.boundary.goals) goals.push_back(vec_to_json(p));
  b["origins"] = origins;
  b["goals"] = goals;
  if (spec.boundary.init_vel) {
    Json v = Json::array();
    for (const auto& p : *spec.boundary.init_vel) v.push_back(vec_to_json(p));
    b["init_vel"] = v;
  }
  if (spec.boundary.final_vel) {
    Json v = Json::array();
    for (const auto& p : *spec.boundary.final_vel) v.push_back(vec_to_json(p));
    b["final_vel"] = v;
  }
  j["boundary"] = b;

  const auto& dp = spec.dynamics_params;
  if (dp.mass != 1.0 || dp.gravity != 9.81 || dp.inertia_x != 1.0 || dp.inertia_y != 1.0 ||
      dp.inertia_z != 1.0) {
    j["dynamics_params"] = {{"mass", dp.mass},
                            {"gravity", dp.gravity},
                            {"inertia_x", dp.inertia_x},
                            {"inertia_y", dp.inertia_y},
                            {"inertia_z", dp.inertia_z}};
  }
  return j;
}

ScenarioSpec scenario_from_json(const Json& j) {
  ScenarioSpec spec;
  spec.version = j.value("version", 1);
  spec.name = j.value("name", std::string());
  for (const auto& ja : j.at("agents")) {
    AgentSpec a;
    a.state_dim = ja.at("state_dim").get<int>();
    a.control_dim = ja.at("control_dim").get<int>();
    a.dynamics = ja.at("dynamics").get<std::string>();
    a.cost = ja.at("cost").get<std::string>();
    spec.agents.push_back(a);
    CostParams cp;
    if (ja.contains("cost_params")) {
      const auto& jc = ja["cost_params"];
      cp.control_weight = jc.value("control_weight", 1.0);
      cp.y_weight = jc.value("y_weight", 0.0);
      cp.mix_weight = jc.value("mix_weight", 1.0);
    }
    spec.cost_params.push_back(cp);
  }
  spec.horizon = j.at("horizon").get<int>();
  spec.dt = j.at("dt").get<double>();
  if (j.contains("known_constraints")) {
    for (const auto& jk : j["known_constraints"]) {
      KnownConstraint k;
      k.kind = jk.at("kind").get<std::string>();
      k.theta = vec_from_json(jk.at("theta"));
      if (jk.contains("face_normals")) k.face_normals = mat_from_json(jk["face_normals"]);
      k.shape_known = jk.value("shape_known", true);
      if (jk.contains("shape")) k.shape = vec_from_json(jk["shape"]);
      spec.known_constraints.push_back(k);
    }
  }
  const auto& fam = j.at("unknown_family");
  spec.unknown_family.kind = fam.at("kind").get<std::string>();
  for (const auto& p : fam.at("theta_bounds"))
    spec.unknown_family.theta_bounds.emplace_back(p[0].get<double>(), p[1].get<double>());
  if (fam.contains("face_normals")) spec.unknown_family.face_normals = mat_from_json(fam["face_normals"]);
  spec.unknown_family.shape_known = fam.value("shape_known", true);
  if (fam.contains("shape")) spec.unknown_family.shape = vec_from_json(fam["shape"]);

  const auto& b = j.at("boundary");
  for (const auto& p : b.at("origins")) spec.boundary.origins.push_back(vec_from_json(p));
  for (const auto& p : b.at("goals")) spec.boundary.goals.push_back(vec_from_json(p));
  if (b.contains("init_vel")) {
    std::vector<VecX> v;
    for (const auto& p : b["init_vel"]) v.push_back(vec_from_json(p));
    spec.boundary.init_vel = v;
  }
  if (b.contains("final_vel")) {
    std::vector<VecX> v;
    for (const auto& p : b["final_vel"]) v.push_back(vec_from_json(p));
    spec.boundary.final_vel = v;
  }
  if (j.contains("dynamics_params")) {
    const auto& jd = j["dynamics_params"];
    spec.dynamics_params.mass = jd.value("mass", 1.0);
    spec.dynamics_params.gravity = jd.value("gravity", 9.81);
    spec.dynamics_params.inertia_x = jd.value("inertia_x", 1.0);
    spec.dynamics_params.inertia_y = jd.value("inertia_y", 1.0);
    spec.dynamics_params.inertia_z = jd.value("inertia_z", 1.0);
  }
  return spec;
}

Json demos_to_json(const DemonstrationSet& demos) {
  Json j;
  j["scenario_hash"] = demos.scenario_hash;
  Json trajs = Json::array();
  for (const auto& t : demos.trajectories) trajs.push_back(vec_to_json(t.flat()));
  j["trajectories"] = trajs;
  if (!demos.noise.empty()) j["noise"] = demos.noise;
  return j;
}

DemonstrationSet demos_from_json(const Json& j, const ScenarioSpec& spec) {
  DemonstrationSet d;
  d.scenario_hash = j.at("scenario_hash").get<std::string>();
  const std::string expect = scenario_content_hash(spec);
  if (d.scenario_hash != expect)
    throw data_quality_error("demo file scenario_hash " + d.scenario_hash +
                             " does not match scenario " + expect);
  for (const auto& a : j.at("trajectories")) d.trajectories.emplace_back(spec, vec_from_json(a));
  if (j.contains("noise")) d.noise = j["noise"].get<std::vector<double>>();
  return d;
}

std::string scenario_content_hash(const ScenarioSpec& spec) {
  if (spec.content_hash_cache.empty()) {
    ScenarioSpec plain = spec;  // hash ignores any pre-existing cache state
    plain.content_hash_cache.clear();
    spec.content_hash_cache = fnv1a_hex(scenario_to_json(plain).dump());
  }
  return spec.content_hash_cache;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IkgError(IkgError::Kind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IkgError(IkgError::Kind::io, "cannot write " + path);
  out << text;
}

Json read_json_file(const std::string& path) { return Json::parse(read_text_file(path)); }

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string file_digest(const std::string& path) { return fnv1a_hex(read_text_file(path)); }

}  // namespace ikg
