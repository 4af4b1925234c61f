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

#include "ikg/mps.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ikg {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string var_label(const MilpModel& m, int j) {
  std::string n = m.var_name(j);
  if (n.empty()) n = "X" + std::to_string(j);
  for (auto& c : n)
    if (c == ' ') c = '_';
  return n;
}

std::string row_label(const MilpModel& m, int r) {
  std::string n = m.row_name(r);
  if (n.empty()) n = "R" + std::to_string(r);
  for (auto& c : n)
    if (c == ' ') c = '_';
  return n;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

void export_mps(const MilpModel& model, const std::string& path, const std::string& name) {
  std::ofstream out(path);
  if (!out) throw IkgError(IkgError::Kind::io, "cannot write " + path);
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int r = 0; r < model.num_rows(); ++r) {
    const char s = static_cast<char>(model.rows()[r].sense);
    out << " " << s << "  " << row_label(model, r) << "\n";
  }
  // Row entries per column.
  std::vector<std::vector<std::pair<int, double>>> col_rows(model.num_vars());
  for (int r = 0; r < model.num_rows(); ++r)
    for (const auto& [j, v] : model.rows()[r].coeffs) col_rows[j].emplace_back(r, v);

  out << "COLUMNS\n";
  bool in_int = false;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.is_binary(j) && !in_int) {
      out << "    MARKER                 'MARKER'                 'INTORG'\n";
      in_int = true;
    } else if (!model.is_binary(j) && in_int) {
      out << "    MARKER                 'MARKER'                 'INTEND'\n";
      in_int = false;
    }
    const std::string vn = var_label(model, j);
    // Every variable appears at least in the objective row.
    out << "    " << vn << "  COST  " << num(model.objective_coeff(j)) << "\n";
    for (const auto& [r, v] : col_rows[j])
      out << "    " << vn << "  " << row_label(model, r) << "  " << num(v) << "\n";
  }
  if (in_int) out << "    MARKER                 'MARKER'                 'INTEND'\n";

  out << "RHS\n";
  for (int r = 0; r < model.num_rows(); ++r)
    if (model.rows()[r].rhs != 0.0)
      out << "    RHS  " << row_label(model, r) << "  " << num(model.rows()[r].rhs) << "\n";

  out << "BOUNDS\n";
  for (int j = 0; j < model.num_vars(); ++j) {
    const std::string vn = var_label(model, j);
    if (model.is_binary(j)) {
      out << " BV BND  " << vn << "\n";
    } else if (model.lo()[j] == model.hi()[j]) {
      out << " FX BND  " << vn << "  " << num(model.lo()[j]) << "\n";
    } else {
      out << " LO BND  " << vn << "  " << num(model.lo()[j]) << "\n";
      out << " UP BND  " << vn << "  " << num(model.hi()[j]) << "\n";
    }
  }
  out << "ENDATA\n";
}

MilpModel import_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IkgError(IkgError::Kind::io, "cannot open " + path);
  MilpModel model;
  enum Section { none, rows, columns, rhs, bounds, done } section = none;

  struct RowInfo {
    RowSense sense;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> coeffs;
  };
  std::vector<RowInfo> row_infos;
  std::vector<std::string> row_names;
  std::map<std::string, int> row_index;
  std::map<std::string, int> var_index;
  std::string obj_name;
  bool in_int = false;

  auto get_var = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    int idx;
    if (in_int) {
      idx = model.add_binary(name);
    } else {
      idx = model.add_continuous(name, 0.0, kLpBoundClamp);
    }
    var_index[name] = idx;
    return idx;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    const bool header = line[0] != ' ' && line[0] != '\t';
    auto tk = tokens(line);
    if (tk.empty()) continue;
    if (header) {
      const std::string& h = tk[0];
      if (h == "NAME") continue;
      if (h == "ROWS") {
        section = rows;
        continue;
      }
      if (h == "COLUMNS") {
        section = columns;
        continue;
      }
      if (h == "RHS") {
        section = rhs;
        continue;
      }
      if (h == "RANGES") {
        section = none;
        continue;
      }
      if (h == "BOUNDS") {
        section = bounds;
        continue;
      }
      if (h == "ENDATA") {
        section = done;
        break;
      }
      throw IkgError(IkgError::Kind::io, "mps: unknown section " + h);
    }
    switch (section) {
      case rows: {
        const std::string& type = tk[0];
        const std::string& rname = tk[1];
        if (type == "N") {
          obj_name = rname;
        } else {
          RowInfo ri;
          ri.sense = type == "L" ? RowSense::le : (type == "G" ? RowSense::ge : RowSense::eq);
          row_index[rname] = static_cast<int>(row_infos.size());
          row_infos.push_back(ri);
          row_names.push_back(rname);
        }
        break;
      }
      case columns: {
        if (tk.size() >= 3 && tk[1] == "'MARKER'") {
          in_int = (tk[2] == "'INTORG'");
          break;
        }
        const int j = get_var(tk[0]);
        for (size_t k = 1; k + 1 < tk.size(); k += 2) {
          const std::string& rname = tk[k];
          const double v = std::stod(tk[k + 1]);
          if (rname == obj_name) {
            model.set_objective_coeff(j, v);
          } else {
            auto it = row_index.find(rname);
            if (it == row_index.end())
              throw IkgError(IkgError::Kind::io, "mps: unknown row " + rname);
            row_infos[it->second].coeffs.emplace_back(j, v);
          }
        }
        break;
      }
      case rhs: {
        for (size_t k = 1; k + 1 < tk.size(); k += 2) {
          auto it = row_index.find(tk[k]);
          if (it == row_index.end()) throw IkgError(IkgError::Kind::io, "mps: rhs for unknown row");
          row_infos[it->second].rhs = std::stod(tk[k + 1]);
        }
        break;
      }
      case bounds: {
        const std::string& type = tk[0];
        const std::string& vname = tk[2];
        auto it = var_index.find(vname);
        if (it == var_index.end()) throw IkgError(IkgError::Kind::io, "mps: bound for unknown var");
        const int j = it->second;
        double lo = model.lo()[j], hi = model.hi()[j];
        if (type == "LO") lo = std::stod(tk[3]);
        else if (type == "UP") hi = std::stod(tk[3]);
        else if (type == "FX") lo = hi = std::stod(tk[3]);
        else if (type == "BV") { lo = 0.0; hi = 1.0; }
        else if (type == "MI") lo = -kLpBoundClamp;
        else if (type == "PL") hi = kLpBoundClamp;
        else throw IkgError(IkgError::Kind::io, "mps: unsupported bound type " + type);
        model.set_bounds(j, lo, hi);
        break;
      }
      default:
        break;
    }
  }
  for (size_t r = 0; r < row_infos.size(); ++r)
    model.add_row(row_infos[r].coeffs, row_infos[r].sense, row_infos[r].rhs, row_names[r]);
  return model;
}

}  // namespace ikg
