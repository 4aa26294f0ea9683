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

#include "audiomt/mr_compound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "audiomt/errors.hpp"
#include "audiomt/mr_basic.hpp"
#include "audiomt/rng.hpp"
#include "audiomt/spectral.hpp"

namespace audiomt::compound {
namespace {

namespace prim = basic::primitives;

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

double one_pole_coefficient(double time_s, int rate) {
  return 1.0 - std::exp(-1.0 / (time_s * rate));
}

}  // namespace

AudioBuffer compress(const AudioBuffer& x, double threshold_db, double ratio,
                     CompressorTiming timing) {
  require(std::isfinite(threshold_db) && threshold_db < 0.0,
          "compressor threshold must be below 0 dBFS");
  require(std::isfinite(ratio) && ratio >= 1.0, "compressor ratio must be >= 1");
  require(timing.attack_s > 0.0 && timing.release_s > 0.0,
          "compressor attack/release must be positive");

  // Linked detector on the mixdown so stereo images do not shift.
  const auto mono = x.mixdown();
  const int rate = x.sample_rate();
  const double detect = one_pole_coefficient(timing.attack_s, rate);
  const double attack = detect;
  const double release = one_pole_coefficient(timing.release_s, rate);

  std::vector<double> envelope(mono.size());
  double mean_square = 0.0;
  double gain_db = 0.0;
  for (std::size_t i = 0; i < mono.size(); ++i) {
    mean_square += detect * (mono[i] * mono[i] - mean_square);
    double target = 0.0;
    if (mean_square > 0.0) {
      const double level = 10.0 * std::log10(2.0 * mean_square);
      if (level > threshold_db) {
        target = threshold_db + (level - threshold_db) / ratio - level;
      }
    }
    gain_db += (target < gain_db ? attack : release) * (target - gain_db);
    envelope[i] = gain_db == 0.0 ? 1.0 : std::pow(10.0, gain_db / 20.0);
  }
  return clamped(prim::apply_envelope(x, envelope));
}

AudioBuffer ring_modulate(const AudioBuffer& x, double carrier_hz) {
  require(std::isfinite(carrier_hz) && carrier_hz > 0.0 &&
              carrier_hz < x.sample_rate() / 2.0,
          "ring modulation carrier must lie in (0, Nyquist)");
  const auto carrier =
      prim::sample_envelope(x.frames(), x.sample_rate(), [&](double t) {
        return std::sin(2.0 * std::numbers::pi * carrier_hz * t);
      });
  return clamped(prim::apply_envelope(x, carrier));
}

AudioBuffer bass_boost(const AudioBuffer& x, double cutoff_hz, double gain_db) {
  require(std::isfinite(cutoff_hz) && cutoff_hz >= 20.0 && cutoff_hz <= 400.0,
          "bass boost cutoff must lie in [20, 400] Hz");
  require(std::isfinite(gain_db) && std::abs(gain_db) <= 40.0,
          "bass boost gain must lie in [-40, 40] dB");
  const AudioBuffer bass = prim::lowpass(x, cutoff_hz);
  return clamped(prim::overlay(x, bass, 0, std::pow(10.0, gain_db / 20.0)));
}

AudioBuffer tremolo(const AudioBuffer& x, double rate_hz, double depth) {
  require(std::isfinite(rate_hz) && rate_hz >= 0.5 && rate_hz <= 20.0,
          "tremolo rate must lie in [0.5, 20] Hz");
  require(std::isfinite(depth) && depth > 0.0 && depth <= 1.0,
          "tremolo depth must lie in (0, 1]");
  const auto envelope =
      prim::sample_envelope(x.frames(), x.sample_rate(), [&](double t) {
        return (1.0 + depth * std::sin(2.0 * std::numbers::pi * rate_hz * t)) /
               (1.0 + depth);
      });
  return clamped(prim::apply_envelope(x, envelope));
}

std::vector<double> default_distortion_kernel(double drive) {
  return {1.0, 0.0, 0.2 * drive};
}

AudioBuffer distort(const AudioBuffer& x, double clip_threshold, double drive,
                    std::vector<double> kernel) {
  require(std::isfinite(clip_threshold) && clip_threshold > 0.0 &&
              clip_threshold <= 1.0,
          "distortion clip threshold must lie in (0, 1]");
  require(std::isfinite(drive) && drive >= 0.0, "distortion drive must be >= 0");
  if (kernel.empty()) kernel = default_distortion_kernel(drive);

  const AudioBuffer clipped = prim::hard_clip(x, clip_threshold);
  const AudioBuffer harmonics =
      prim::map_channels(clipped, [&](std::span<const double> ch) {
        auto full = convolve(ch, kernel);
        full.resize(ch.size());
        return full;
      });
  const std::size_t n = x.frames();
  const auto ramp = prim::sample_envelope(n, 1, [&](double i) {
    return n > 1 ? 1.0 + drive * i / static_cast<double>(n - 1) : 1.0;
  });
  return clamped(prim::apply_envelope(harmonics, ramp));
}

AudioBuffer echo(const AudioBuffer& x, double delay_s, double decay, int taps) {
  require(std::isfinite(delay_s) && delay_s > 0.0, "echo delay must be > 0");
  require(std::isfinite(decay) && decay >= 0.0 && decay < 1.0,
          "echo decay must lie in [0, 1)");
  require(taps >= 1, "echo needs at least one tap");
  require(delay_s * taps <= 60.0, "echo tail longer than 60 s");
  if (decay == 0.0) return x;
  const auto delay = static_cast<std::size_t>(
      std::llround(delay_s * x.sample_rate()));
  require(delay >= 1, "echo delay shorter than one frame");
  AudioBuffer out = x;
  double weight = 1.0;
  for (int k = 1; k <= taps; ++k) {
    weight *= decay;
    out = prim::overlay(out, x, k * delay, weight);
  }
  return clamped(out);
}

std::vector<double> reverb_impulse_response(double intensity, double duration_s,
                                            std::uint64_t seed,
                                            int sample_rate) {
  require(std::isfinite(intensity) && intensity >= 0.0,
          "reverb intensity must be >= 0");
  require(std::isfinite(duration_s) && duration_s >= 0.0 && duration_s <= 10.0,
          "reverb duration must lie in [0, 10] s");
  const auto tail = static_cast<std::size_t>(
      std::llround(duration_s * sample_rate));
  std::vector<double> ir(tail + 1, 0.0);
  ir[0] = 1.0;
  DeterministicRng rng(seed);
  for (std::size_t k = 1; k <= tail; ++k) {
    const double decay =
        std::pow(10.0, -3.0 * static_cast<double>(k) / static_cast<double>(tail));
    ir[k] = intensity * decay * rng.normal();
  }
  return ir;
}

AudioBuffer reverb(const AudioBuffer& x, double intensity, double duration_s,
                   std::uint64_t seed) {
  auto reflections =
      reverb_impulse_response(intensity, duration_s, seed, x.sample_rate());
  // The unit tap is added directly rather than through the (FFT) convolution,
  // so a silent tail leaves the dry signal bit-exact.
  reflections[0] = 0.0;
  return clamped(prim::map_channels(x, [&](std::span<const double> ch) {
    auto y = convolve(ch, reflections);
    for (std::size_t i = 0; i < ch.size(); ++i) y[i] += ch[i];
    return y;
  }));
}

AudioBuffer apply(const AudioBuffer& x, const CompoundPerturbation& p) {
  return std::visit(
      [&](const auto& op) -> AudioBuffer {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Compression>) {
          return compress(x, op.threshold_db, op.ratio);
        } else if constexpr (std::is_same_v<T, RingMod>) {
          return ring_modulate(x, op.carrier_hz);
        } else if constexpr (std::is_same_v<T, BassBoost>) {
          return bass_boost(x, op.cutoff_hz, op.gain_db);
        } else if constexpr (std::is_same_v<T, Tremolo>) {
          return tremolo(x, op.rate_hz, op.depth);
        } else if constexpr (std::is_same_v<T, Distortion>) {
          return distort(x, op.clip_threshold, op.drive);
        } else if constexpr (std::is_same_v<T, Echo>) {
          return echo(x, op.delay_s, op.decay, op.taps);
        } else {
          return reverb(x, op.intensity, op.duration_s, op.seed);
        }
      },
      p);
}

}  // namespace audiomt::compound
