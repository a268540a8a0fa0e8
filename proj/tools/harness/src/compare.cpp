// Copyright 2026 The hamq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hamq/harness/compare.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "hamq/numeric_format.hpp"

namespace hamq::harness {

namespace {

constexpr const char* kHeader = "iter,sup_error,frobenius_error,omega_size,hmc_samples,wall_ms";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

std::vector<ConvergenceRow> read_convergence(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("convergence: missing or unexpected header");
  }
  std::vector<ConvergenceRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 6) {
      throw std::runtime_error("convergence: line " + std::to_string(line_no) + ": expected 6 columns");
    }
    try {
      ConvergenceRow row;
      const double iter = parse_double(cells[0]);
      row.iter = static_cast<int>(iter);
      if (row.iter != iter) throw std::invalid_argument("iteration is not an integer");
      row.sup_error = parse_double(cells[1]);
      row.frobenius_error = parse_double(cells[2]);
      row.omega_size = parse_double(cells[3]);
      row.hmc_samples = parse_double(cells[4]);
      row.wall_ms = parse_double(cells[5]);
      rows.push_back(row);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("convergence: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void compare(const std::vector<std::filesystem::path>& run_dirs, std::ostream& out,
             std::ostream& warnings) {
  if (run_dirs.size() < 2) throw std::invalid_argument("compare needs at least two run directories");

  std::vector<std::string> names;
  std::map<std::string, int> uses;
  std::vector<std::vector<ConvergenceRow>> runs;
  for (const auto& dir : run_dirs) {
    const auto path = dir / "convergence.csv";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    runs.push_back(read_convergence(in));
    std::string name = std::filesystem::absolute(dir).lexically_normal().filename().string();
    if (name.empty()) name = std::filesystem::absolute(dir).lexically_normal().parent_path().filename().string();
    const int n = uses[name]++;
    names.push_back(n == 0 ? name : name + "_" + std::to_string(n + 1));
  }
  // A later duplicate may collide with an earlier literal name such as "run_2".
  for (std::size_t k = 0; k < names.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (names[j] == names[k]) names[k] += "_" + std::to_string(k + 1);
    }
  }

  std::size_t length = runs.front().size();
  for (const auto& r : runs) length = std::min(length, r.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].size() != length) {
      warnings << "warning: truncating '" << names[k] << "' from " << runs[k].size() << " to "
               << length << " iterations\n";
    }
  }

  out << "iter";
  for (const auto& name : names) {
    for (const char* col : {"sup_error", "frobenius_error", "omega_size", "hmc_samples", "wall_ms"}) {
      out << ',' << col << '_' << name;
    }
  }
  for (std::size_t k = 1; k < names.size(); ++k) {
    out << ",sup_error_delta_" << names[k] << ",frobenius_error_delta_" << names[k];
  }
  out << '\n';

  for (std::size_t t = 0; t < length; ++t) {
    const int iter = runs.front()[t].iter;
    for (std::size_t k = 1; k < runs.size(); ++k) {
      if (runs[k][t].iter != iter) {
        throw std::runtime_error("compare: iteration numbers of '" + names[k] + "' and '" +
                                 names[0] + "' disagree at row " + std::to_string(t + 1));
      }
    }
    out << iter;
    for (const auto& r : runs) {
      const auto& row = r[t];
      out << ',' << format_double(row.sup_error) << ',' << format_double(row.frobenius_error)
          << ',' << format_double(row.omega_size) << ',' << format_double(row.hmc_samples) << ','
          << format_double(row.wall_ms);
    }
    for (std::size_t k = 1; k < runs.size(); ++k) {
      out << ',' << format_double(runs[k][t].sup_error - runs[0][t].sup_error) << ','
          << format_double(runs[k][t].frobenius_error - runs[0][t].frobenius_error);
    }
    out << '\n';
  }
}

}  // namespace hamq::harness
