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

#include "hamq/harness/heatmap.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include "hamq/numeric_format.hpp"

namespace hamq::harness {

namespace {

std::vector<std::size_t> parse_list(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : comma - start);
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw std::invalid_argument("slice: bad " + std::string(what) + " index '" +
                                  std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

SliceSpec parse_slice(std::string_view text) {
  const std::size_t at = text.find('@');
  const auto free = parse_list(text.substr(0, at), "free");
  if (free.size() != 2) throw std::invalid_argument("slice: expected two free dimensions 'i,j'");
  if (free[0] == free[1]) throw std::invalid_argument("slice: free dimensions must differ");
  SliceSpec slice;
  slice.dim_i = static_cast<int>(free[0]);
  slice.dim_j = static_cast<int>(free[1]);
  if (at != std::string_view::npos) slice.fixed = parse_list(text.substr(at + 1), "fixed");
  return slice;
}

std::string to_string(const SliceSpec& slice) {
  std::string out = std::to_string(slice.dim_i) + "," + std::to_string(slice.dim_j) + "@";
  for (std::size_t k = 0; k < slice.fixed.size(); ++k) {
    if (k > 0) out += ",";
    out += std::to_string(slice.fixed[k]);
  }
  return out;
}

SliceSpec default_slice(const StateSpace& states) {
  if (states.dims() < 2) throw std::invalid_argument("heatmap needs at least two state dimensions");
  SliceSpec slice;
  for (int d = 2; d < states.dims(); ++d) {
    slice.fixed.push_back(static_cast<std::size_t>(states.points(d) / 2));
  }
  return slice;
}

void validate_slice(const SliceSpec& slice, const StateSpace& states) {
  const int dims = states.dims();
  if (slice.dim_i < 0 || slice.dim_i >= dims || slice.dim_j < 0 || slice.dim_j >= dims) {
    throw std::invalid_argument("slice: free dimension out of range for a " +
                                std::to_string(dims) + "-D state space");
  }
  if (slice.dim_i == slice.dim_j) throw std::invalid_argument("slice: free dimensions must differ");
  if (slice.fixed.size() != static_cast<std::size_t>(dims - 2)) {
    throw std::invalid_argument("slice: expected " + std::to_string(dims - 2) +
                                " fixed indices, got " + std::to_string(slice.fixed.size()));
  }
  std::size_t k = 0;
  for (int d = 0; d < dims; ++d) {
    if (d == slice.dim_i || d == slice.dim_j) continue;
    if (slice.fixed[k] >= static_cast<std::size_t>(states.points(d))) {
      throw std::invalid_argument("slice: fixed index " + std::to_string(slice.fixed[k]) +
                                  " out of range for dimension " + std::to_string(d));
    }
    ++k;
  }
}

void write_policy_heatmap(std::ostream& out, const DiscreteMdp& m, const QTable& q,
                          const SliceSpec& slice) {
  validate_slice(slice, m.states());
  check_shape(m, q);
  const auto& states = m.states();
  const auto policy = greedy_policy(q);
  std::vector<int> multi(static_cast<std::size_t>(states.dims()), 0);
  std::size_t k = 0;
  for (int d = 0; d < states.dims(); ++d) {
    if (d != slice.dim_i && d != slice.dim_j) multi[d] = static_cast<int>(slice.fixed[k++]);
  }
  out << "dim_i,dim_j,action_value\n";
  for (int i = 0; i < states.points(slice.dim_i); ++i) {
    for (int j = 0; j < states.points(slice.dim_j); ++j) {
      multi[slice.dim_i] = i;
      multi[slice.dim_j] = j;
      const std::size_t s = states.flat_index(multi);
      const double action = m.actions().point(policy[s])[0];
      out << format_double(states.coordinate(slice.dim_i, i)) << ','
          << format_double(states.coordinate(slice.dim_j, j)) << ',' << format_double(action)
          << '\n';
    }
  }
}

}  // namespace hamq::harness
