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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hamq/completion.hpp"
#include "hamq/envs.hpp"
#include "hamq/hmc.hpp"
#include "hamq/learning.hpp"
#include "hamq/mdp.hpp"

namespace hamq {
namespace {

// Run with: build/benchmarks/hamq_benchmarks --benchmark_filter=<name>

const DiscreteMdp& cartpole() {
  static const DiscreteMdp m = envs::make_cartpole();
  return m;
}

hmc::TargetDensity cartpole_target() {
  const auto& m = cartpole();
  return make_target(m, 312, 4, 50.0);
}

void BM_Leapfrog(benchmark::State& state) {
  const auto target = cartpole_target();
  const hmc::PhasePoint start{target.mu(), Eigen::VectorXd::Ones(4)};
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmc::leapfrog(target, start, steps, 0.02));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Leapfrog)->Arg(10)->Arg(100);

void BM_SampleChain(benchmark::State& state) {
  const auto target = cartpole_target();
  hmc::HmcConfig config;
  config.n_samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmc::sample_chain(target, config));
    ++config.seed;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleChain)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveUpdate(benchmark::State& state) {
  const auto& m = cartpole();
  const QTable q = QTable::uniform_random(m.num_states(), m.num_actions(), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exhaustive_update(m, q, 1));
  }
}
BENCHMARK(BM_ExhaustiveUpdate)->Unit(benchmark::kMillisecond);

void BM_Complete(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd u(625, 5), v(10, 5);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng);
  const Eigen::MatrixXd g = u * v.transpose();
  std::bernoulli_distribution keep(0.5);
  std::vector<completion::Entry> entries;
  for (std::size_t r = 0; r < 625; ++r) {
    for (std::size_t c = 0; c < 10; ++c) {
      if (keep(rng)) entries.push_back({r, c, g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))});
    }
  }
  const completion::ObservedSet obs(625, 10, std::move(entries));
  for (auto _ : state) {
    benchmark::DoNotOptimize(completion::complete(obs));
  }
}
BENCHMARK(BM_Complete)->Unit(benchmark::kMillisecond);

void BM_HqIterate(benchmark::State& state) {
  const auto& m = cartpole();
  TrainConfig config;
  config.support_prob = 0.05;
  config.threads = 1;
  const QTable q = QTable::uniform_random(m.num_states(), m.num_actions(), 0);
  int t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hq_iterate(m, q, config, t++));
  }
}
BENCHMARK(BM_HqIterate)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hamq

BENCHMARK_MAIN();
