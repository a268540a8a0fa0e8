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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamq/mdp.hpp"
#include "hamq/qtable.hpp"

namespace hamq::harness {

/// Two free grid dimensions plus one grid index for every other dimension,
/// written "i,j@f1,f2,..." with the fixed indices in increasing dimension order.
struct SliceSpec {
  int dim_i = 0;
  int dim_j = 1;
  std::vector<std::size_t> fixed;
};

/// Throws std::invalid_argument on malformed text.
SliceSpec parse_slice(std::string_view text);
std::string to_string(const SliceSpec& slice);

/// Dimensions 0 and 1 free, every other dimension at its centre index.
SliceSpec default_slice(const StateSpace& states);

/// Throws std::invalid_argument if the slice does not fit the grid.
void validate_slice(const SliceSpec& slice, const StateSpace& states);

/// CSV with header `dim_i,dim_j,action_value`: grid coordinates of the two
/// free dimensions and the control value of the greedy action, dim_i slowest.
void write_policy_heatmap(std::ostream& out, const DiscreteMdp& m, const QTable& q,
                          const SliceSpec& slice);

}  // namespace hamq::harness
