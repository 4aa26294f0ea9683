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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "audiomt/audio.hpp"

// Basic signal-level perturbations: time-domain (stretch, shift), spatial
// (pan, surround), frequency (pitch shift), injection (noise, repetition) and
// amplitude (gain). Every operation returns a new buffer at the input's sample
// rate, validates its parameters (ParameterError) and clamps its output.
namespace audiomt::basic {

enum class ResampleKernel { kLinear, kWindowedSinc };

// Overlap-add stretch with cross-correlation alignment (50 ms frames, +/-5 ms
// search). Output frames = round(frames * factor); pitch is preserved.
// factor in [0.25, 4]; factor 1 returns the input unchanged.
AudioBuffer time_stretch(const AudioBuffer& x, double factor);

// y[n] = x[n - delta*rate]; the vacated end is zero-filled. |delta| must be
// below the buffer duration.
AudioBuffer time_shift(const AudioBuffer& x, double delta_s);

// Constant-power pan to stereo: left cos(theta), right sin(theta) with
// theta = (position + 1) * pi / 4. Stereo input is first folded to a mono
// source carrying the same total power.
AudioBuffer pan(const AudioBuffer& x, double position);

// Rotating pan, position(t) = sin(2*pi*rotation_hz*t), rotation_hz in (0, 5].
AudioBuffer surround(const AudioBuffer& x, double rotation_hz);

// Reads x at positions n*ratio; ratio > 1 raises pitch and shortens the clip.
AudioBuffer resample(const AudioBuffer& x, double ratio,
                     ResampleKernel kernel = ResampleKernel::kLinear);

// Resample by 2^(semitones/12), then stretch back to the original length.
// |semitones| <= 12.
AudioBuffer pitch_shift(const AudioBuffer& x, double semitones,
                        ResampleKernel kernel = ResampleKernel::kLinear);

// Adds seeded Gaussian white noise scaled so the pooled SNR equals
// target_snr_db before clamping. Silent input is a DomainError.
AudioBuffer inject_noise(const AudioBuffer& x, double target_snr_db,
                         std::uint64_t seed);

// Inserts `count` extra copies of [start_s, end_s) right after the segment.
AudioBuffer repeat_segment(const AudioBuffer& x, double start_s, double end_s,
                           int count);

// y = clamp(x * 10^(db/20)), |db| <= 40.
AudioBuffer gain(const AudioBuffer& x, double db);

struct TimeStretch {
  double factor = 1.0;
};
struct TimeShift {
  double seconds = 0.0;
};
struct Pan {
  double position = 0.0;
};
struct Surround {
  double rotation_hz = 1.0;
};
struct PitchShift {
  double semitones = 0.0;
};
struct NoiseInjection {
  double target_snr_db = 20.0;
  std::uint64_t seed = 0;
};
struct RepeatSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  int count = 1;
};
struct Gain {
  double db = 0.0;
};

using BasicPerturbation =
    std::variant<TimeStretch, TimeShift, Pan, Surround, PitchShift,
                 NoiseInjection, RepeatSegment, Gain>;

AudioBuffer apply(const AudioBuffer& x, const BasicPerturbation& p);

// Unclamped building blocks. Compound relations are assembled from these.
namespace primitives {

using Channel = std::vector<double>;

AudioBuffer map_channels(const AudioBuffer& x,
                         const std::function<Channel(std::span<const double>)>& fn);

// Time-varying amplitude: y[n] = x[n] * envelope[n].
AudioBuffer apply_envelope(const AudioBuffer& x, std::span<const double> envelope);

// Envelope sampled from a function of time in seconds.
std::vector<double> sample_envelope(std::size_t frames, int sample_rate,
                                    const std::function<double(double)>& fn);

AudioBuffer scale(const AudioBuffer& x, double factor);

// Mixes `overlay` into `base` starting at frame `offset`, scaled by `weight`;
// the result is as long as whichever reaches further.
AudioBuffer overlay(const AudioBuffer& base, const AudioBuffer& overlay,
                    std::size_t offset, double weight = 1.0);

// Zero-pads (or truncates) to exactly `frames`.
AudioBuffer fit_length(const AudioBuffer& x, std::size_t frames);

// First-order (one-pole) low-pass at cutoff_hz.
AudioBuffer lowpass(const AudioBuffer& x, double cutoff_hz);

AudioBuffer hard_clip(const AudioBuffer& x, double threshold);

// Stereo placement with a per-frame pan position in [-1, 1].
AudioBuffer place(const AudioBuffer& x, std::span<const double> positions);

// Overlap-add stretch without range checks; pitch_shift relies on it.
AudioBuffer stretch_unchecked(const AudioBuffer& x, double factor);

}  // namespace primitives
}  // namespace audiomt::basic
