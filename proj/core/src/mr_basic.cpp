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

#include "audiomt/mr_basic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "audiomt/errors.hpp"
#include "audiomt/rng.hpp"
#include "audiomt/spectral.hpp"

namespace audiomt::basic {
namespace {

using primitives::Channel;

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

std::size_t to_frames(double seconds, int rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

double read_or_zero(std::span<const double> x, std::ptrdiff_t i) {
  return (i < 0 || i >= static_cast<std::ptrdiff_t>(x.size())) ? 0.0 : x[i];
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Channel resample_channel(std::span<const double> x, double ratio,
                         ResampleKernel kernel) {
  if (x.empty()) return {};
  const auto out_frames =
      static_cast<std::size_t>(std::floor((x.size() - 1) / ratio)) + 1;
  Channel out(out_frames);
  if (kernel == ResampleKernel::kLinear) {
    for (std::size_t n = 0; n < out_frames; ++n) {
      const double pos = n * ratio;
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      const double a = x[i];
      const double b = i + 1 < x.size() ? x[i + 1] : 0.0;
      out[n] = a + frac * (b - a);
    }
    return out;
  }
  // Hann-windowed sinc; the cutoff drops below the input Nyquist when
  // decimating so the shifted spectrum does not alias.
  constexpr int kZeroCrossings = 16;
  const double cutoff = std::min(1.0, 1.0 / ratio);
  const double half_width = kZeroCrossings / cutoff;
  for (std::size_t n = 0; n < out_frames; ++n) {
    const double pos = n * ratio;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(pos - half_width));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(pos + half_width));
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      const double d = pos - static_cast<double>(i);
      const double w =
          0.5 + 0.5 * std::cos(std::numbers::pi * d / half_width);
      acc += read_or_zero(x, i) * cutoff * sinc(cutoff * d) * w;
    }
    out[n] = acc;
  }
  return out;
}

// Waveform-similarity overlap-add. Frame k's centre lands at output k*Hs and
// nominally reads input k*Ha; the start is nudged within +/-tolerance to best
// continue the previously copied frame.
std::vector<std::ptrdiff_t> stretch_positions(std::span<const double> mono,
                                              std::size_t frame,
                                              std::size_t out_frames,
                                              double factor, int rate) {
  const std::ptrdiff_t hop_out = static_cast<std::ptrdiff_t>(frame / 2);
  const double hop_in = hop_out / factor;
  const auto tolerance = static_cast<std::ptrdiff_t>(to_frames(0.005, rate));

  std::vector<std::ptrdiff_t> starts;
  std::ptrdiff_t previous = -hop_out;
  starts.push_back(previous);
  for (std::ptrdiff_t k = 1; (k - 1) * hop_out < static_cast<std::ptrdiff_t>(out_frames);
       ++k) {
    const std::ptrdiff_t nominal =
        static_cast<std::ptrdiff_t>(std::llround(k * hop_in)) - hop_out;
    const std::ptrdiff_t natural = previous + hop_out;
    std::ptrdiff_t best = nominal;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t d = -tolerance; d <= tolerance; ++d) {
      const std::ptrdiff_t candidate = nominal + d;
      double score = 0.0;
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frame); ++i) {
        score += read_or_zero(mono, natural + i) * read_or_zero(mono, candidate + i);
      }
      // Strict comparison keeps the nominal position on flat (silent) input.
      if (score > best_score ||
          (score == best_score && std::abs(d) < std::abs(best - nominal))) {
        best_score = score;
        best = candidate;
      }
    }
    starts.push_back(best);
    previous = best;
  }
  return starts;
}

AudioBuffer fold_to_mono(const AudioBuffer& x) {
  if (x.channel_count() == 1) return x;
  auto mono = x.mixdown();
  double in_power = 0.0;
  for (const auto& ch : x.channels()) {
    double ms = 0.0;
    for (double s : ch) ms += s * s;
    in_power += ms;
  }
  double mono_power = 0.0;
  for (double s : mono) mono_power += s * s;
  if (mono_power > 0.0) {
    const double g = std::sqrt(in_power / mono_power);
    for (double& s : mono) s *= g;
  }
  return AudioBuffer::mono(std::move(mono), x.sample_rate());
}

}  // namespace

namespace primitives {

AudioBuffer map_channels(
    const AudioBuffer& x,
    const std::function<Channel(std::span<const double>)>& fn) {
  std::vector<Channel> out;
  out.reserve(x.channel_count());
  for (const auto& ch : x.channels()) out.push_back(fn(ch));
  return AudioBuffer(std::move(out), x.sample_rate());
}

std::vector<double> sample_envelope(std::size_t frames, int sample_rate,
                                    const std::function<double(double)>& fn) {
  std::vector<double> env(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    env[n] = fn(static_cast<double>(n) / sample_rate);
  }
  return env;
}

AudioBuffer apply_envelope(const AudioBuffer& x,
                           std::span<const double> envelope) {
  if (envelope.size() != x.frames()) {
    throw DomainError("envelope length must match the buffer");
  }
  return map_channels(x, [&](std::span<const double> ch) {
    Channel out(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) out[i] = ch[i] * envelope[i];
    return out;
  });
}

AudioBuffer scale(const AudioBuffer& x, double factor) {
  return map_channels(x, [&](std::span<const double> ch) {
    Channel out(ch.begin(), ch.end());
    for (double& s : out) s *= factor;
    return out;
  });
}

AudioBuffer overlay(const AudioBuffer& base, const AudioBuffer& top,
                    std::size_t offset, double weight) {
  if (base.channel_count() != top.channel_count()) {
    throw DomainError("overlay requires matching channel counts");
  }
  const std::size_t frames = std::max(base.frames(), offset + top.frames());
  std::vector<Channel> out;
  for (std::size_t c = 0; c < base.channel_count(); ++c) {
    Channel ch(frames, 0.0);
    const auto b = base.channel(c);
    std::copy(b.begin(), b.end(), ch.begin());
    const auto t = top.channel(c);
    for (std::size_t i = 0; i < t.size(); ++i) ch[offset + i] += weight * t[i];
    out.push_back(std::move(ch));
  }
  return AudioBuffer(std::move(out), base.sample_rate());
}

AudioBuffer fit_length(const AudioBuffer& x, std::size_t frames) {
  return map_channels(x, [&](std::span<const double> ch) {
    Channel out(frames, 0.0);
    std::copy_n(ch.begin(), std::min(frames, ch.size()), out.begin());
    return out;
  });
}

AudioBuffer lowpass(const AudioBuffer& x, double cutoff_hz) {
  const double alpha =
      1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz / x.sample_rate());
  return map_channels(x, [&](std::span<const double> ch) {
    Channel out(ch.size());
    double state = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      state += alpha * (ch[i] - state);
      out[i] = state;
    }
    return out;
  });
}

AudioBuffer hard_clip(const AudioBuffer& x, double threshold) {
  return map_channels(x, [&](std::span<const double> ch) {
    Channel out(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
      out[i] = std::clamp(ch[i], -threshold, threshold);
    }
    return out;
  });
}

AudioBuffer place(const AudioBuffer& x, std::span<const double> positions) {
  const AudioBuffer source = fold_to_mono(x);
  if (positions.size() != source.frames()) {
    throw DomainError("pan positions must match the buffer");
  }
  const auto mono = source.channel(0);
  Channel left(mono.size()), right(mono.size());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    const double theta = (positions[i] + 1.0) * std::numbers::pi / 4.0;
    left[i] = std::cos(theta) * mono[i];
    right[i] = std::sin(theta) * mono[i];
  }
  return AudioBuffer({std::move(left), std::move(right)}, x.sample_rate());
}

AudioBuffer stretch_unchecked(const AudioBuffer& x, double factor) {
  if (factor == 1.0 || x.empty()) return x;
  const int rate = x.sample_rate();
  std::size_t frame = to_frames(0.05, rate);
  frame += frame % 2;
  const auto out_frames =
      static_cast<std::size_t>(std::llround(x.frames() * factor));
  const auto mono = x.mixdown();
  const auto starts = stretch_positions(mono, frame, out_frames, factor, rate);
  const auto window = hann_window(frame);
  const std::ptrdiff_t hop_out = static_cast<std::ptrdiff_t>(frame / 2);

  std::vector<double> weight(out_frames, 0.0);
  std::vector<Channel> out(x.channel_count(), Channel(out_frames, 0.0));
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::ptrdiff_t out_start = static_cast<std::ptrdiff_t>(k) * hop_out - hop_out;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frame); ++i) {
      const std::ptrdiff_t o = out_start + i;
      if (o < 0 || o >= static_cast<std::ptrdiff_t>(out_frames)) continue;
      weight[o] += window[i];
      for (std::size_t c = 0; c < x.channel_count(); ++c) {
        out[c][o] += window[i] * read_or_zero(x.channel(c), starts[k] + i);
      }
    }
  }
  for (auto& ch : out) {
    for (std::size_t i = 0; i < out_frames; ++i) {
      if (weight[i] > 1e-9) ch[i] /= weight[i];
    }
  }
  return AudioBuffer(std::move(out), rate);
}

}  // namespace primitives

AudioBuffer time_stretch(const AudioBuffer& x, double factor) {
  require(std::isfinite(factor) && factor >= 0.25 && factor <= 4.0,
          "time_stretch factor must lie in [0.25, 4]");
  if (factor == 1.0) return x;
  return clamped(primitives::stretch_unchecked(x, factor));
}

AudioBuffer time_shift(const AudioBuffer& x, double delta_s) {
  require(std::isfinite(delta_s) && std::abs(delta_s) < x.duration(),
          "time_shift |delta| must be below the clip duration");
  const auto shift = static_cast<std::ptrdiff_t>(
      std::llround(delta_s * x.sample_rate()));
  return primitives::map_channels(x, [&](std::span<const double> ch) {
    Channel out(ch.size(), 0.0);
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(ch.size()); ++n) {
      out[n] = read_or_zero(ch, n - shift);
    }
    return out;
  });
}

AudioBuffer pan(const AudioBuffer& x, double position) {
  require(std::isfinite(position) && std::abs(position) <= 1.0,
          "pan position must lie in [-1, 1]");
  const std::vector<double> positions(x.frames(), position);
  return clamped(primitives::place(x, positions));
}

AudioBuffer surround(const AudioBuffer& x, double rotation_hz) {
  require(std::isfinite(rotation_hz) && rotation_hz > 0.0 && rotation_hz <= 5.0,
          "surround rotation must lie in (0, 5] Hz");
  const auto positions =
      primitives::sample_envelope(x.frames(), x.sample_rate(), [&](double t) {
        return std::sin(2.0 * std::numbers::pi * rotation_hz * t);
      });
  return clamped(primitives::place(x, positions));
}

AudioBuffer resample(const AudioBuffer& x, double ratio,
                     ResampleKernel kernel) {
  require(std::isfinite(ratio) && ratio > 0.0, "resample ratio must be > 0");
  return primitives::map_channels(x, [&](std::span<const double> ch) {
    return resample_channel(ch, ratio, kernel);
  });
}

AudioBuffer pitch_shift(const AudioBuffer& x, double semitones,
                        ResampleKernel kernel) {
  require(std::isfinite(semitones) && std::abs(semitones) <= 12.0,
          "pitch_shift semitones must lie in [-12, 12]");
  if (semitones == 0.0 || x.empty()) return x;
  const double ratio = std::exp2(semitones / 12.0);
  const AudioBuffer shifted = resample(x, ratio, kernel);
  const double back = static_cast<double>(x.frames()) /
                      static_cast<double>(shifted.frames());
  const AudioBuffer restored = primitives::stretch_unchecked(shifted, back);
  return clamped(primitives::fit_length(restored, x.frames()));
}

AudioBuffer inject_noise(const AudioBuffer& x, double target_snr_db,
                         std::uint64_t seed) {
  require(std::isfinite(target_snr_db), "target SNR must be finite");
  if (x.empty()) throw DomainError("inject_noise on an empty buffer");
  const double signal_rms = pooled_rms(x);
  if (signal_rms == 0.0) {
    throw DomainError("inject_noise on a silent buffer: SNR undefined");
  }
  DeterministicRng rng(seed);
  std::vector<Channel> noise;
  double acc = 0.0;
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    noise.push_back(rng.normal_vector(x.frames()));
    for (double v : noise.back()) acc += v * v;
  }
  const double drawn_rms =
      std::sqrt(acc / static_cast<double>(x.frames() * x.channel_count()));
  const double target_rms = signal_rms / std::pow(10.0, target_snr_db / 20.0);
  const double g = drawn_rms > 0.0 ? target_rms / drawn_rms : 0.0;
  std::vector<Channel> out;
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    const auto ch = x.channel(c);
    Channel y(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
      y[i] = clamp_sample(ch[i] + g * noise[c][i]);
    }
    out.push_back(std::move(y));
  }
  return AudioBuffer(std::move(out), x.sample_rate());
}

AudioBuffer repeat_segment(const AudioBuffer& x, double start_s, double end_s,
                           int count) {
  require(count >= 1, "repeat count must be >= 1");
  require(std::isfinite(start_s) && std::isfinite(end_s) && start_s >= 0.0 &&
              start_s < end_s && end_s <= x.duration(),
          "repeat window must satisfy 0 <= start < end <= duration");
  const std::size_t begin = to_frames(start_s, x.sample_rate());
  const std::size_t end =
      std::min(to_frames(end_s, x.sample_rate()), x.frames());
  require(begin < end, "repeat window is shorter than one frame");
  return primitives::map_channels(x, [&](std::span<const double> ch) {
    Channel out;
    out.reserve(ch.size() + count * (end - begin));
    out.insert(out.end(), ch.begin(), ch.begin() + end);
    for (int k = 0; k < count; ++k) {
      out.insert(out.end(), ch.begin() + begin, ch.begin() + end);
    }
    out.insert(out.end(), ch.begin() + end, ch.end());
    return out;
  });
}

AudioBuffer gain(const AudioBuffer& x, double db) {
  require(std::isfinite(db) && std::abs(db) <= 40.0,
          "gain must lie in [-40, 40] dB");
  if (db == 0.0) return x;
  return clamped(primitives::scale(x, std::pow(10.0, db / 20.0)));
}

AudioBuffer apply(const AudioBuffer& x, const BasicPerturbation& p) {
  return std::visit(
      [&](const auto& op) -> AudioBuffer {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, TimeStretch>) {
          return time_stretch(x, op.factor);
        } else if constexpr (std::is_same_v<T, TimeShift>) {
          return time_shift(x, op.seconds);
        } else if constexpr (std::is_same_v<T, Pan>) {
          return pan(x, op.position);
        } else if constexpr (std::is_same_v<T, Surround>) {
          return surround(x, op.rotation_hz);
        } else if constexpr (std::is_same_v<T, PitchShift>) {
          return pitch_shift(x, op.semitones);
        } else if constexpr (std::is_same_v<T, NoiseInjection>) {
          return inject_noise(x, op.target_snr_db, op.seed);
        } else if constexpr (std::is_same_v<T, RepeatSegment>) {
          return repeat_segment(x, op.start_s, op.end_s, op.count);
        } else {
          return gain(x, op.db);
        }
      },
      p);
}

}  // namespace audiomt::basic
