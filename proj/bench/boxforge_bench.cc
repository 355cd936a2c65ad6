/* Copyright 2026 The Boxforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Serial vs OpenMP timings for the parallel kernels. Each pair runs the same
// input through the serial twin and the threaded version.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "boxforge/consolidate.h"
#include "boxforge/kernels.h"
#include "boxforge/losses.h"
#include "boxforge/toydata.h"

namespace boxforge {
namespace {

std::vector<Box> RandomBoxes(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0, 300), len(4, 40);
  std::vector<Box> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double y = pos(rng), x = pos(rng);
    out.push_back(Box::Make2D(y, x, y + len(rng), x + len(rng)));
  }
  return out;
}

std::vector<Detection> RandomDetections(int images, int per_image) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(0.01, 1.0);
  std::vector<Detection> out;
  for (int i = 0; i < images; ++i) {
    const auto boxes = RandomBoxes(per_image, 100 + i);
    for (int k = 0; k < per_image; ++k) {
      Detection d;
      d.box = boxes[k];
      d.score = score(rng);
      d.image_id = "im" + std::to_string(i);
      d.view_id = "v" + std::to_string(k % 8);
      out.push_back(d);
    }
  }
  return out;
}

LossBatch RandomBatch(int pixels, int classes) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> probs(static_cast<std::size_t>(pixels) * classes);
  std::vector<int> labels(pixels);
  for (int i = 0; i < pixels; ++i) {
    double s = 0;
    for (int k = 0; k < classes; ++k) s += probs[i * classes + k] = u(rng);
    for (int k = 0; k < classes; ++k) probs[i * classes + k] /= s;
    labels[i] = static_cast<int>(rng() % classes);
  }
  return LossBatch::FromLabels(std::move(probs), classes, labels);
}

void BM_IouMatrixSerial(benchmark::State& state) {
  const auto a = RandomBoxes(static_cast<int>(state.range(0)), 1);
  const auto b = RandomBoxes(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::iou_matrix(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_IouMatrixParallel(benchmark::State& state) {
  const auto a = RandomBoxes(static_cast<int>(state.range(0)), 1);
  const auto b = RandomBoxes(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(iou_matrix(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_LossGradSerial(benchmark::State& state) {
  const auto batch = RandomBatch(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::dice_ce_grad(batch));
}

void BM_LossGradParallel(benchmark::State& state) {
  const auto batch = RandomBatch(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(dice_ce_grad(batch));
}

const ImageJob kWbcJob = [](const std::vector<Detection>& d) { return wbc(d, WbcConfig{}); };

void BM_WbcPerImageSerial(benchmark::State& state) {
  const auto dets = RandomDetections(static_cast<int>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(serial::for_each_image(dets, kWbcJob));
}

void BM_WbcPerImageParallel(benchmark::State& state) {
  const auto dets = RandomDetections(static_cast<int>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(for_each_image(dets, kWbcJob));
}

ToyConfig ToyBatch(int n) {
  ToyConfig cfg;
  cfg.n_images = n;
  cfg.seed = 11;
  return cfg;
}

void BM_ToyGenerateSerial(benchmark::State& state) {
  const auto cfg = ToyBatch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::generate(cfg));
}

void BM_ToyGenerateParallel(benchmark::State& state) {
  const auto cfg = ToyBatch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg));
}

BENCHMARK(BM_IouMatrixSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_IouMatrixParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_LossGradSerial)->Arg(1 << 16)->Arg(320 * 320);
BENCHMARK(BM_LossGradParallel)->Arg(1 << 16)->Arg(320 * 320);
BENCHMARK(BM_WbcPerImageSerial)->Arg(16);
BENCHMARK(BM_WbcPerImageParallel)->Arg(16);
BENCHMARK(BM_ToyGenerateSerial)->Arg(32);
BENCHMARK(BM_ToyGenerateParallel)->Arg(32);

}  // namespace
}  // namespace boxforge

BENCHMARK_MAIN();
