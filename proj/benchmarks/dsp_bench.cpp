// Copyright 2026 The audiomt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "audiomt/mr_basic.hpp"
#include "audiomt/mr_compound.hpp"
#include "audiomt/spectral.hpp"
#include "audiomt/spotter.hpp"

namespace {

using namespace audiomt;

AudioBuffer tone(double seconds, int rate = 16000) {
  std::vector<double> x(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / rate) +
           0.1 * std::sin(2.0 * std::numbers::pi * 97.0 * i / rate);
  }
  return AudioBuffer::mono(std::move(x), rate);
}

void BM_Fft(benchmark::State& state) {
  std::vector<std::complex<double>> data(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::sin(0.01 * i);
  for (auto _ : state) {
    fft(data);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_TimeStretch(benchmark::State& state) {
  const auto x = tone(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(basic::time_stretch(x, 0.8));
}
BENCHMARK(BM_TimeStretch)->Unit(benchmark::kMillisecond);

void BM_PitchShift(benchmark::State& state) {
  const auto x = tone(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(basic::pitch_shift(x, 4.0));
}
BENCHMARK(BM_PitchShift)->Unit(benchmark::kMillisecond);

void BM_Compress(benchmark::State& state) {
  const auto x = tone(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(compound::compress(x, -20.0, 4.0));
}
BENCHMARK(BM_Compress)->Unit(benchmark::kMillisecond);

void BM_Reverb(benchmark::State& state) {
  const auto x = tone(3.0);
  const double seconds = static_cast<double>(state.range(0)) / 1000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compound::reverb(x, 0.3, seconds, 1));
  }
}
BENCHMARK(BM_Reverb)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Mfcc(benchmark::State& state) {
  const auto x = tone(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spotter::extract_mfcc(x));
}
BENCHMARK(BM_Mfcc)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Dtw(benchmark::State& state) {
  const auto a = spotter::without_energy(spotter::extract_mfcc(tone(0.5)));
  const auto b = spotter::without_energy(
      spotter::extract_mfcc(basic::time_stretch(tone(0.5), 1.3)));
  for (auto _ : state) benchmark::DoNotOptimize(spotter::dtw_distance(a, b));
}
BENCHMARK(BM_Dtw)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
