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

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "audiomt/audio.hpp"

// Compound signal-level perturbations. Each one is a composition of the basic
// building blocks in mr_basic.hpp; the sources of this module may depend on
// audio-core and mr-basic only (enforced by the architecture test).
namespace audiomt::compound {

struct CompressorTiming {
  double attack_s = 0.010;
  double release_s = 0.100;
};

// Static downward compressor on an RMS detector calibrated so a full-scale sine
// reads 0 dBFS. Levels L above threshold T map to T + (L - T) / ratio.
AudioBuffer compress(const AudioBuffer& x, double threshold_db, double ratio,
                     CompressorTiming timing = {});

// y[n] = x[n] * sin(2*pi*carrier_hz*n/rate), 0 < carrier_hz < rate/2.
AudioBuffer ring_modulate(const AudioBuffer& x, double carrier_hz);

// y = clamp(x + 10^(gain_db/20) * LPF(x)), one-pole LPF, 20 <= cutoff <= 400.
AudioBuffer bass_boost(const AudioBuffer& x, double cutoff_hz, double gain_db);

// y = x * (1 + depth*sin(2*pi*rate_hz*t)) / (1 + depth).
AudioBuffer tremolo(const AudioBuffer& x, double rate_hz, double depth);

// Harmonic kernel [1, 0, 0.2*drive].
std::vector<double> default_distortion_kernel(double drive);

// Hard clip at +/-clip_threshold, convolve with the kernel (truncated to the
// input length), then a linear gain ramp from 1 to 1 + drive and a clamp.
// An empty kernel selects default_distortion_kernel(drive).
AudioBuffer distort(const AudioBuffer& x, double clip_threshold, double drive,
                    std::vector<double> kernel = {});

// Feed-forward delay line: y[n] = x[n] + sum_k decay^k x[n - k*delay].
// The output is extended to hold the last tap unless decay is 0.
AudioBuffer echo(const AudioBuffer& x, double delay_s, double decay, int taps);

// Impulse response: unit tap followed by duration_s of seeded Gaussian noise
// scaled by intensity under an envelope falling 60 dB over duration_s.
std::vector<double> reverb_impulse_response(double intensity, double duration_s,
                                            std::uint64_t seed,
                                            int sample_rate);

// x convolved with reverb_impulse_response; length frames + ir - 1.
AudioBuffer reverb(const AudioBuffer& x, double intensity, double duration_s,
                   std::uint64_t seed);

struct Compression {
  double threshold_db = -20.0;
  double ratio = 4.0;
};
struct RingMod {
  double carrier_hz = 30.0;
};
struct BassBoost {
  double cutoff_hz = 200.0;
  double gain_db = 6.0;
};
struct Tremolo {
  double rate_hz = 4.0;
  double depth = 0.5;
};
struct Distortion {
  double clip_threshold = 0.5;
  double drive = 0.5;
};
struct Echo {
  double delay_s = 0.25;
  double decay = 0.5;
  int taps = 2;
};
struct Reverb {
  double intensity = 0.3;
  double duration_s = 0.5;
  std::uint64_t seed = 0;
};

using CompoundPerturbation = std::variant<Compression, RingMod, BassBoost,
                                          Tremolo, Distortion, Echo, Reverb>;

AudioBuffer apply(const AudioBuffer& x, const CompoundPerturbation& p);

}  // namespace audiomt::compound
