// Copyright 2026 The Chartforge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "chartforge/bitmap.h"
#include "chartforge/eval_core.h"
#include "chartforge/rle.h"

namespace {

using chartforge::Bitmap;

Bitmap random_blob(int h, int w, uint32_t seed) {
  std::mt19937 rng(seed);
  Bitmap m(h, w);
  std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1), rs(4, 40);
  for (int k = 0; k < 8; ++k) {
    const int cx = xs(rng), cy = ys(rng), r = rs(rng);
    m.fill_rect(std::max(0, cx - r), std::max(0, cy - r), std::min(w, cx + r),
                std::min(h, cy + r));
  }
  return m;
}

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  chartforge::ScoreMatrix scores(n, std::vector<double>(n));
  chartforge::EligibilityMatrix eligible(n, std::vector<bool>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      scores[i][j] = u(rng);
      eligible[i][j] = scores[i][j] > 0.3;
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(chartforge::hungarian_match(scores, eligible));
  }
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(128);

void BM_BoundaryIou(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Bitmap a = random_blob(side, side, 1);
  const Bitmap b = random_blob(side, side, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chartforge::boundary_iou(a, b));
  }
}
BENCHMARK(BM_BoundaryIou)->Arg(256)->Arg(800);

void BM_RleRoundTrip(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Bitmap a = random_blob(side, side, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chartforge::decode_rle(chartforge::encode_rle(a)));
  }
}
BENCHMARK(BM_RleRoundTrip)->Arg(256)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
