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

#include "hamq/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hamq {

Grid::Grid(std::vector<Interval> ranges, std::vector<int> points_per_dim)
    : ranges_(std::move(ranges)), points_(std::move(points_per_dim)) {
  if (ranges_.empty()) {
    throw std::invalid_argument("grid needs at least one dimension");
  }
  if (ranges_.size() != points_.size()) {
    throw std::invalid_argument("grid ranges and points_per_dim differ in length");
  }
  for (std::size_t d = 0; d < ranges_.size(); ++d) {
    const auto& r = ranges_[d];
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
      throw std::invalid_argument("grid dimension " + std::to_string(d) +
                                  " needs a finite interval with lo < hi");
    }
    if (points_[d] < 1) {
      throw std::invalid_argument("grid dimension " + std::to_string(d) +
                                  " needs at least one point");
    }
  }
  strides_.assign(points_.size(), 1);
  size_ = 1;
  for (int d = dims() - 1; d >= 0; --d) {
    strides_[d] = size_;
    size_ *= static_cast<std::size_t>(points_[d]);
  }
}

double Grid::spacing(int dim) const {
  const int n = points(dim);
  return n < 2 ? 0.0 : range(dim).width() / static_cast<double>(n - 1);
}

double Grid::coordinate(int dim, int k) const {
  const int n = points(dim);
  if (k < 0 || k >= n) {
    throw std::out_of_range("grid coordinate index out of range");
  }
  const auto& r = range(dim);
  if (n == 1) return 0.5 * (r.lo + r.hi);
  if (k == n - 1) return r.hi;
  return r.lo + spacing(dim) * static_cast<double>(k);
}

void Grid::check_index(std::size_t index) const {
  if (index >= size_) {
    throw std::out_of_range("grid index " + std::to_string(index) +
                            " out of range (size " + std::to_string(size_) + ")");
  }
}

Eigen::VectorXd Grid::point(std::size_t index) const {
  Eigen::VectorXd out(dims());
  point_into(index, out);
  return out;
}

void Grid::point_into(std::size_t index, Eigen::Ref<Eigen::VectorXd> out) const {
  check_index(index);
  for (int d = 0; d < dims(); ++d) {
    const auto k = static_cast<int>((index / strides_[d]) % points_[d]);
    out[d] = coordinate(d, k);
  }
}

std::size_t Grid::index_of(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dims()) {
    throw std::invalid_argument("vector dimension does not match grid");
  }
  std::size_t index = 0;
  for (int d = 0; d < dims(); ++d) {
    if (!std::isfinite(x[d])) throw std::invalid_argument("non-finite coordinate");
    const int k = nearest_along(d, x[d]);
    if (std::abs(coordinate(d, k) - x[d]) > kSnapTolerance) {
      throw std::invalid_argument("vector is not a grid point (dimension " +
                                  std::to_string(d) + ")");
    }
    index += strides_[d] * static_cast<std::size_t>(k);
  }
  return index;
}

int Grid::nearest_along(int dim, double x) const {
  const int n = points(dim);
  if (n == 1) return 0;
  const auto& r = range(dim);
  if (x <= r.lo) return 0;
  if (x >= r.hi) return n - 1;
  const double u = (x - r.lo) / spacing(dim);
  int k = static_cast<int>(std::floor(u));
  if (k >= n - 1) return n - 1;
  // Compare actual distances so the tie rule is exact in coordinate space.
  const double below = x - coordinate(dim, k);
  const double above = coordinate(dim, k + 1) - x;
  return above < below ? k + 1 : k;
}

std::size_t Grid::nearest(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dims()) {
    throw std::invalid_argument("vector dimension does not match grid");
  }
  std::size_t index = 0;
  for (int d = 0; d < dims(); ++d) {
    if (!std::isfinite(x[d])) throw std::invalid_argument("non-finite coordinate");
    index += strides_[d] * static_cast<std::size_t>(nearest_along(d, x[d]));
  }
  return index;
}

std::vector<int> Grid::multi_index(std::size_t index) const {
  check_index(index);
  std::vector<int> out(points_.size());
  for (int d = 0; d < dims(); ++d) {
    out[d] = static_cast<int>((index / strides_[d]) % points_[d]);
  }
  return out;
}

std::size_t Grid::flat_index(std::span<const int> multi) const {
  if (multi.size() != points_.size()) {
    throw std::invalid_argument("multi-index dimension does not match grid");
  }
  std::size_t index = 0;
  for (int d = 0; d < dims(); ++d) {
    if (multi[d] < 0 || multi[d] >= points_[d]) {
      throw std::out_of_range("multi-index component out of range");
    }
    index += strides_[d] * static_cast<std::size_t>(multi[d]);
  }
  return index;
}

}  // namespace hamq
