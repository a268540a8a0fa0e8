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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hamq {

/// Closed interval [lo, hi] in environment units.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Rectilinear grid over a box in R^D.
///
/// Points are evenly spaced along each dimension and include both interval
/// endpoints whenever a dimension has two or more points; a single-point
/// dimension sits at the interval midpoint. Flat indices are row-major with
/// dimension 0 varying slowest.
class Grid {
 public:
  /// Coordinates further than this from a grid value are not grid points.
  static constexpr double kSnapTolerance = 1e-9;

  Grid(std::vector<Interval> ranges, std::vector<int> points_per_dim);

  int dims() const { return static_cast<int>(ranges_.size()); }
  std::size_t size() const { return size_; }

  const Interval& range(int dim) const { return ranges_.at(dim); }
  int points(int dim) const { return points_.at(dim); }
  const std::vector<Interval>& ranges() const { return ranges_; }
  const std::vector<int>& points_per_dim() const { return points_; }

  /// Spacing between adjacent grid values along `dim` (0 for one-point dims).
  double spacing(int dim) const;
  /// k-th grid value along `dim`.
  double coordinate(int dim, int k) const;

  Eigen::VectorXd point(std::size_t index) const;
  void point_into(std::size_t index, Eigen::Ref<Eigen::VectorXd> out) const;

  /// Inverse of point(); throws std::invalid_argument for off-grid vectors.
  std::size_t index_of(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Grid point closest in Euclidean distance. Coordinates outside a range
  /// clamp to the nearest endpoint; per-dimension ties go to the lower value.
  std::size_t nearest(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int nearest_along(int dim, double x) const;

  std::vector<int> multi_index(std::size_t index) const;
  std::size_t flat_index(std::span<const int> multi) const;

  /// Row-major stride of `dim`.
  std::size_t stride(int dim) const { return strides_.at(dim); }

 private:
  void check_index(std::size_t index) const;

  std::vector<Interval> ranges_;
  std::vector<int> points_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Discretized state space S.
class StateSpace : public Grid {
 public:
  using Grid::Grid;
};

/// Discretized action space A.
class ActionSpace : public Grid {
 public:
  using Grid::Grid;
};

}  // namespace hamq
