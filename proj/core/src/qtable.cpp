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

#include "hamq/qtable.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hamq/numeric_format.hpp"

namespace hamq {

namespace {

void check_same_shape(const QTable& a, const QTable& b) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
    throw std::invalid_argument("Q tables differ in shape");
  }
}

}  // namespace

QTable::QTable(std::size_t states, std::size_t actions, double fill)
    : values_(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(states),
                                        static_cast<Eigen::Index>(actions), fill)) {
  if (!std::isfinite(fill)) throw std::invalid_argument("Q table fill must be finite");
}

QTable::QTable(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw std::invalid_argument("Q table entries must be finite");
}

QTable QTable::uniform_random(std::size_t states, std::size_t actions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd values(states, actions);
  // Row-major fill so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index s = 0; s < values.rows(); ++s) {
    for (Eigen::Index a = 0; a < values.cols(); ++a) values(s, a) = unit(rng);
  }
  return QTable(std::move(values));
}

Eigen::VectorXd QTable::state_values() const { return values_.rowwise().maxCoeff(); }

std::vector<std::size_t> greedy_policy(const QTable& q) {
  std::vector<std::size_t> policy(q.num_states(), 0);
  const auto& v = q.values();
  for (Eigen::Index s = 0; s < v.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < v.cols(); ++a) {
      if (v(s, a) > v(s, best)) best = a;
    }
    policy[s] = static_cast<std::size_t>(best);
  }
  return policy;
}

double sup_error(const QTable& a, const QTable& b) {
  check_same_shape(a, b);
  if (a.values().size() == 0) return 0.0;
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

double frobenius_error(const QTable& a, const QTable& b) {
  check_same_shape(a, b);
  return (a.values() - b.values()).norm();
}

void write_qtable(std::ostream& out, const QTable& q) {
  out << "qtable v1 " << q.num_states() << ' ' << q.num_actions() << '\n';
  const auto& v = q.values();
  for (Eigen::Index s = 0; s < v.rows(); ++s) {
    for (Eigen::Index a = 0; a < v.cols(); ++a) {
      if (a > 0) out << ' ';
      out << format_double(v(s, a));
    }
    out << '\n';
  }
}

QTable read_qtable(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("qtable: empty input");
  std::istringstream header(line);
  std::string magic, version;
  long long rows = -1, cols = -1;
  header >> magic >> version >> rows >> cols;
  if (magic != "qtable" || version != "v1" || header.fail() || rows < 0 || cols < 0) {
    throw std::runtime_error("qtable: malformed header '" + line + "'");
  }
  Eigen::MatrixXd values(rows, cols);
  for (long long s = 0; s < rows; ++s) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("qtable: expected " + std::to_string(rows) + " rows, got " +
                               std::to_string(s));
    }
    std::istringstream row(line);
    std::string token;
    long long a = 0;
    while (row >> token) {
      if (a >= cols) {
        throw std::runtime_error("qtable: too many values on row " + std::to_string(s));
      }
      try {
        values(s, a++) = parse_double(token);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("qtable: row " + std::to_string(s) + ": bad value '" + token +
                                 "'");
      }
      if (!std::isfinite(values(s, a - 1))) {
        throw std::runtime_error("qtable: row " + std::to_string(s) + ": non-finite value");
      }
    }
    if (a != cols) {
      throw std::runtime_error("qtable: row " + std::to_string(s) + " has " +
                               std::to_string(a) + " values, expected " + std::to_string(cols));
    }
  }
  return QTable(std::move(values));
}

void save_qtable(const std::filesystem::path& path, const QTable& q) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_qtable(out, q);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

QTable load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_qtable(in);
}

}  // namespace hamq
