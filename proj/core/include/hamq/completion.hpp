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

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hamq::completion {

struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Observed entries of a rows x cols matrix. Construction rejects
/// out-of-range indices, duplicate cells and non-finite values.
class ObservedSet {
 public:
  ObservedSet(std::size_t rows, std::size_t cols, std::vector<Entry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Writes every observed value into m.
  void overwrite(Eigen::MatrixXd& m) const;
  /// Boolean mask of observed cells.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// Soft-impute settings. The shrinkage threshold starts at `shrinkage`
/// (default 0.1 x the largest singular value of the observation-filled warm
/// start). Each time the relative change drops below `rel_tolerance` the
/// threshold is multiplied by `shrinkage_decay`, down to `min_shrinkage_ratio`
/// x its start value; convergence at that floor ends the solve. Setting
/// shrinkage_decay to 1 gives plain fixed-threshold soft-impute.
/// `max_iterations` bounds the total over all thresholds.
struct CompletionConfig {
  int max_iterations = 500;
  double rel_tolerance = 1e-4;
  std::optional<double> shrinkage;
  double shrinkage_decay = 0.5;
  double min_shrinkage_ratio = 1e-4;
  std::optional<Eigen::MatrixXd> warm_start;
};

struct CompletionResult {
  Eigen::MatrixXd matrix;
  int iterations = 0;
  bool converged = false;
  /// Soft-impute objective 0.5*||P_obs(Z - obs)||_F^2 + tau*||Z||_* of each
  /// low-rank iterate Z, evaluated at the threshold tau used to form it.
  std::vector<double> objective;
  /// Threshold used at each iteration.
  std::vector<double> thresholds;
};

std::vector<double> singular_values(const Eigen::MatrixXd& m);

/// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& m);

/// Smallest k whose leading singular values reach `fraction` of the nuclear
/// norm. Singular values below 1e-10 x the largest count as zero; the zero
/// matrix has rank 0.
int approx_rank(const Eigen::MatrixXd& m, double fraction = 0.99);

/// Approximates argmin ||X||_* subject to X agreeing with `obs` on its cells
/// by iterative singular-value soft-thresholding. Observed cells of the result
/// equal the observed values exactly; rows and columns with no observed cell
/// keep their warm-start values (zero without a warm start). Non-convergence within max_iterations is
/// reported through CompletionResult::converged, not an exception.
CompletionResult complete(const ObservedSet& obs, const CompletionConfig& config = {});

}  // namespace hamq::completion
