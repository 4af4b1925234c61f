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

#ifndef IKG_MPS_HPP
#define IKG_MPS_HPP

#include <string>

#include "ikg/milp.hpp"

namespace ikg {

// MPS with ROWS/COLUMNS/RHS/BOUNDS sections and INTORG/INTEND markers around
// binary columns. Numeric fields carry full double precision so a re-import
// reconstructs the model exactly; field alignment follows the fixed layout.
void export_mps(const MilpModel& model, const std::string& path, const std::string& name = "IKG");
MilpModel import_mps(const std::string& path);

}  // namespace ikg

#endif  // IKG_MPS_HPP
