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

#ifndef IKG_JSON_IO_HPP
#define IKG_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "ikg/core_model.hpp"

namespace ikg {

using Json = nlohmann::json;

// Scenario file schema:
//   {version, agents:[{state_dim, control_dim, dynamics, cost}], horizon, dt,
//    known_constraints:[...], unknown_family:{kind, theta_bounds},
//    boundary:{origins, goals, init_vel?, final_vel?}}
Json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& j);

// Demonstration file schema: {scenario_hash, trajectories:[[...flat xi...]]}
Json demos_to_json(const DemonstrationSet& demos);
DemonstrationSet demos_from_json(const Json& j, const ScenarioSpec& spec);

// Canonical serialization hash of a scenario; demo files reference it.
std::string scenario_content_hash(const ScenarioSpec& spec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Digest of a file's bytes (FNV-1a hex) for report traceability.
std::string file_digest(const std::string& path);

}  // namespace ikg

#endif  // IKG_JSON_IO_HPP
