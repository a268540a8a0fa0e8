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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace hamq {

/// Dense |S| x |A| table of action values. Immutable once built.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions, double fill = 0.0);
  /// Throws std::invalid_argument on non-finite entries.
  explicit QTable(Eigen::MatrixXd values);

  /// Entries drawn uniformly from [0, 1].
  static QTable uniform_random(std::size_t states, std::size_t actions, std::uint64_t seed);

  std::size_t num_states() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_actions() const { return static_cast<std::size_t>(values_.cols()); }

  double operator()(std::size_t s, std::size_t a) const { return values_(s, a); }
  const Eigen::MatrixXd& values() const { return values_; }

  /// max_b Q(s, b) for every state.
  Eigen::VectorXd state_values() const;

  friend bool operator==(const QTable& a, const QTable& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// Per state, the smallest action index attaining the row maximum.
std::vector<std::size_t> greedy_policy(const QTable& q);

/// Largest absolute entrywise difference. Throws on shape mismatch.
double sup_error(const QTable& a, const QTable& b);
/// Frobenius norm of the difference. Throws on shape mismatch.
double frobenius_error(const QTable& a, const QTable& b);

// Text persistence: a `qtable v1 <|S|> <|A|>` header line followed by one
// line per state holding |A| values printed with 17 significant digits.
void write_qtable(std::ostream& out, const QTable& q);
QTable read_qtable(std::istream& in);
void save_qtable(const std::filesystem::path& path, const QTable& q);
QTable load_qtable(const std::filesystem::path& path);

}  // namespace hamq
