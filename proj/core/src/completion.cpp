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

#include "hamq/completion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hamq::completion {

ObservedSet::ObservedSet(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  std::vector<bool> seen(rows_ * cols_, false);
  for (const auto& e : entries_) {
    if (e.row >= rows_ || e.col >= cols_) {
      throw std::invalid_argument("observed entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") out of range");
    }
    if (!std::isfinite(e.value)) throw std::invalid_argument("observed value is not finite");
    const std::size_t cell = e.row * cols_ + e.col;
    if (seen[cell]) {
      throw std::invalid_argument("duplicate observed entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ")");
    }
    seen[cell] = true;
  }
}

void ObservedSet::overwrite(Eigen::MatrixXd& m) const {
  for (const auto& e : entries_) {
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
  }
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> ObservedSet::mask() const {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows_, cols_, false);
  for (const auto& e : entries_) {
    out(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = true;
  }
  return out;
}

std::vector<double> singular_values(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

double nuclear_norm(const Eigen::MatrixXd& m) {
  const auto sv = singular_values(m);
  double total = 0.0;
  for (const double s : sv) total += s;
  return total;
}

int approx_rank(const Eigen::MatrixXd& m, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("approx_rank fraction must lie in (0, 1]");
  }
  auto sv = singular_values(m);  // descending
  if (sv.empty() || sv.front() <= 0.0) return 0;
  const double floor = 1e-10 * sv.front();
  for (auto& s : sv) {
    if (s < floor) s = 0.0;
  }
  double total = 0.0;
  for (const double s : sv) total += s;
  double running = 0.0;
  for (std::size_t k = 0; k < sv.size(); ++k) {
    running += sv[k];
    if (running >= fraction * total) return static_cast<int>(k + 1);
  }
  return static_cast<int>(sv.size());
}

CompletionResult complete(const ObservedSet& obs, const CompletionConfig& config) {
  if (obs.empty()) throw std::invalid_argument("completion needs at least one observed entry");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(config.rel_tolerance > 0.0)) throw std::invalid_argument("rel_tolerance must be positive");
  if (!(config.shrinkage_decay > 0.0 && config.shrinkage_decay <= 1.0)) {
    throw std::invalid_argument("shrinkage_decay must lie in (0, 1]");
  }
  if (!(config.min_shrinkage_ratio > 0.0 && config.min_shrinkage_ratio <= 1.0)) {
    throw std::invalid_argument("min_shrinkage_ratio must lie in (0, 1]");
  }
  if (config.shrinkage && !(*config.shrinkage > 0.0)) {
    throw std::invalid_argument("shrinkage must be positive");
  }

  const auto rows = static_cast<Eigen::Index>(obs.rows());
  const auto cols = static_cast<Eigen::Index>(obs.cols());
  CompletionResult result;
  if (config.warm_start) {
    if (config.warm_start->rows() != rows || config.warm_start->cols() != cols) {
      throw std::invalid_argument("warm start shape does not match observations");
    }
    result.matrix = *config.warm_start;
  } else {
    result.matrix = Eigen::MatrixXd::Zero(rows, cols);
  }
  obs.overwrite(result.matrix);

  // Rows and columns without any observation are not identifiable; they keep
  // their warm-start values and the solver runs on the observed block.
  std::vector<Eigen::Index> row_map(obs.rows(), -1);
  std::vector<Eigen::Index> col_map(obs.cols(), -1);
  for (const auto& e : obs.entries()) {
    row_map[e.row] = 0;
    col_map[e.col] = 0;
  }
  std::vector<Eigen::Index> active_rows;
  std::vector<Eigen::Index> active_cols;
  for (std::size_t r = 0; r < obs.rows(); ++r) {
    if (row_map[r] >= 0) {
      row_map[r] = static_cast<Eigen::Index>(active_rows.size());
      active_rows.push_back(static_cast<Eigen::Index>(r));
    }
  }
  for (std::size_t c = 0; c < obs.cols(); ++c) {
    if (col_map[c] >= 0) {
      col_map[c] = static_cast<Eigen::Index>(active_cols.size());
      active_cols.push_back(static_cast<Eigen::Index>(c));
    }
  }
  const auto sub_rows = static_cast<Eigen::Index>(active_rows.size());
  const auto sub_cols = static_cast<Eigen::Index>(active_cols.size());

  Eigen::MatrixXd z = result.matrix(active_rows, active_cols);
  Eigen::MatrixXd observed_values = Eigen::MatrixXd::Zero(sub_rows, sub_cols);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(sub_rows, sub_cols, false);
  for (const auto& e : obs.entries()) {
    observed_values(row_map[e.row], col_map[e.col]) = e.value;
    mask(row_map[e.row], col_map[e.col]) = true;
  }
  const auto restore = [&](Eigen::MatrixXd& m) {
    for (const auto& e : obs.entries()) m(row_map[e.row], col_map[e.col]) = e.value;
  };

  if (mask.all()) {
    result.converged = true;
    return result;
  }

  double tau = config.shrinkage ? *config.shrinkage : 0.1 * [&] {
    const auto sv = singular_values(z);
    return sv.empty() ? 0.0 : sv.front();
  }();
  if (tau <= 0.0) {
    // All-zero data with a zero warm start: zero is the minimum-norm completion.
    result.matrix(active_rows, active_cols) = z;
    result.converged = true;
    return result;
  }
  const double tau_floor = tau * config.min_shrinkage_ratio;

  for (int it = 1; it <= config.max_iterations; ++it) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
    Eigen::MatrixXd low_rank = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();

    const Eigen::MatrixXd residual =
        mask.select(low_rank - observed_values, Eigen::MatrixXd::Zero(sub_rows, sub_cols));
    result.objective.push_back(0.5 * residual.squaredNorm() + tau * shrunk.sum());
    result.thresholds.push_back(tau);

    restore(low_rank);
    const double change = (low_rank - z).norm() / std::max(1.0, z.norm());
    z = std::move(low_rank);
    result.iterations = it;

    if (change < config.rel_tolerance) {
      // Converged at this threshold: stop at the floor, otherwise lower it
      // and continue from the current iterate.
      if (config.shrinkage_decay == 1.0 || tau <= tau_floor) {
        result.converged = true;
        break;
      }
      tau = std::max(tau * config.shrinkage_decay, tau_floor);
    }
  }
  result.matrix(active_rows, active_cols) = z;
  return result;
}

}  // namespace hamq::completion
