/*
 Copyright 2026 The salad Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <benchmark/benchmark.h>

#include <vector>

#include "salad/certify/cover.hpp"
#include "salad/envs/dynamics.hpp"
#include "salad/envs/render.hpp"
#include "salad/losses/lmi.hpp"
#include "salad/nets/model.hpp"
#include "salad/random.hpp"
#include "salad/tensor/ops.hpp"
#include "salad/tensor/tape.hpp"

namespace {

using salad::Rng;
using salad::tensor::Tensor;

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  for (double& v : t.data()) v = salad::uniform(rng, -1.0, 1.0);
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = random_tensor(n, n, rng);
  const Tensor b = random_tensor(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(salad::tensor::linalg::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * 2 * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

void BM_LogdetWithGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Tensor r = random_tensor(n, n, rng);
  Tensor m = salad::tensor::linalg::matmul(r, salad::tensor::linalg::transpose(r));
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) += static_cast<double>(n);
  for (auto _ : state) {
    salad::tensor::Tape tape;
    const salad::tensor::Var x = tape.leaf(m);
    tape.backward(salad::tensor::logdet(x));
    benchmark::DoNotOptimize(x.grad());
  }
}
BENCHMARK(BM_LogdetWithGradient)->Arg(18)->Arg(66);

void BM_RenderPendulum(benchmark::State& state) {
  salad::envs::EnvSpec spec = salad::envs::EnvSpec::pendulum();
  spec.frame_width = spec.frame_height = static_cast<std::size_t>(state.range(0));
  const auto s = salad::envs::State::pendulum(0.4, 1.0);
  const auto prev = salad::envs::predecessor(spec, s, 0.0);
  std::vector<double> out(spec.observation_size());
  for (auto _ : state) {
    salad::envs::render_into(spec, prev, s, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RenderPendulum)->Arg(32)->Arg(64);

void BM_Encode(benchmark::State& state) {
  Rng rng(3);
  salad::nets::MlpSpec spec;
  spec.widths = {2048, 256, 128, 2};
  const salad::nets::Mlp encoder = salad::nets::Mlp::initialized(spec, rng);
  const Tensor frames = random_tensor(static_cast<std::size_t>(state.range(0)), 2048, rng);
  for (auto _ : state) benchmark::DoNotOptimize(salad::nets::encode(encoder, frames));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(1024);

void BM_CoveringRadius(benchmark::State& state) {
  Rng rng(4);
  const Tensor data = random_tensor(static_cast<std::size_t>(state.range(0)), 2, rng);
  const Tensor probes = salad::certify::grid_points(salad::certify::bounding_box(data), 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(salad::certify::covering_radius(data, probes));
  }
}
BENCHMARK(BM_CoveringRadius)->Arg(3000)->Arg(30000);

void BM_BuildLmi(benchmark::State& state) {
  Rng rng(5);
  salad::nets::MlpSpec spec;
  spec.widths = {2, 32, 32, 1};
  const salad::nets::Mlp barrier = salad::nets::Mlp::initialized(spec, rng);
  Tensor lambda({1, 64});
  for (double& v : lambda.data()) v = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(salad::losses::build_lmi(barrier, lambda, 2.0));
  }
}
BENCHMARK(BM_BuildLmi);

}  // namespace
BENCHMARK_MAIN();
