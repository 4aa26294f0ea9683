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

#include "audiomt/audio.hpp"

#include <algorithm>
#include <cmath>

#include "audiomt/errors.hpp"

namespace audiomt {

AudioBuffer::AudioBuffer(std::vector<std::vector<double>> channels,
                         int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw DomainError("sample rate must be positive");
  }
  if (channels_.empty() || channels_.size() > 2) {
    throw DomainError("channel count must be 1 or 2");
  }
  const std::size_t n = channels_.front().size();
  for (const auto& ch : channels_) {
    if (ch.size() != n) {
      throw DomainError("channels must have identical frame counts");
    }
    for (double s : ch) {
      if (!std::isfinite(s)) throw DomainError("non-finite sample");
    }
  }
}

AudioBuffer AudioBuffer::mono(std::vector<double> samples, int sample_rate) {
  std::vector<std::vector<double>> channels;
  channels.push_back(std::move(samples));
  return AudioBuffer(std::move(channels), sample_rate);
}

AudioBuffer AudioBuffer::silence(std::size_t frames, int sample_rate,
                                 std::size_t channels) {
  return AudioBuffer(std::vector<std::vector<double>>(
                         channels, std::vector<double>(frames, 0.0)),
                     sample_rate);
}

std::vector<double> AudioBuffer::mixdown() const {
  if (channels_.size() == 1) return channels_.front();
  std::vector<double> out(frames(), 0.0);
  for (const auto& ch : channels_) {
    for (std::size_t i = 0; i < ch.size(); ++i) out[i] += ch[i];
  }
  const double scale = 1.0 / static_cast<double>(channels_.size());
  for (double& s : out) s *= scale;
  return out;
}

double clamp_sample(double value) noexcept {
  return std::clamp(value, -1.0, 1.0);
}

AudioBuffer clamped(const AudioBuffer& buffer) {
  auto channels = buffer.channels();
  for (auto& ch : channels) {
    for (double& s : ch) s = clamp_sample(s);
  }
  return AudioBuffer(std::move(channels), buffer.sample_rate());
}

double rms(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("rms of an empty signal");
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

std::vector<double> rms(const AudioBuffer& buffer) {
  if (buffer.empty()) throw DomainError("rms of an empty buffer");
  std::vector<double> out;
  out.reserve(buffer.channel_count());
  for (const auto& ch : buffer.channels()) out.push_back(rms(ch));
  return out;
}

double pooled_rms(const AudioBuffer& buffer) {
  if (buffer.empty()) throw DomainError("rms of an empty buffer");
  double acc = 0.0;
  for (const auto& ch : buffer.channels()) {
    for (double s : ch) acc += s * s;
  }
  return std::sqrt(acc / static_cast<double>(buffer.frames() *
                                             buffer.channel_count()));
}

double peak(const AudioBuffer& buffer) noexcept {
  double p = 0.0;
  for (const auto& ch : buffer.channels()) {
    for (double s : ch) p = std::max(p, std::abs(s));
  }
  return p;
}

std::optional<double> measure_snr(const AudioBuffer& signal,
                                  const AudioBuffer& noisy) {
  if (signal.channel_count() != noisy.channel_count() ||
      signal.frames() != noisy.frames()) {
    throw DomainError("measure_snr requires buffers of equal shape");
  }
  const double signal_rms = pooled_rms(signal);
  if (signal_rms == 0.0) throw DomainError("measure_snr on a silent signal");
  double acc = 0.0;
  for (std::size_t c = 0; c < signal.channel_count(); ++c) {
    const auto a = signal.channel(c);
    const auto b = noisy.channel(c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = b[i] - a[i];
      acc += d * d;
    }
  }
  if (acc == 0.0) return std::nullopt;
  const double noise_rms = std::sqrt(
      acc / static_cast<double>(signal.frames() * signal.channel_count()));
  return 20.0 * std::log10(signal_rms / noise_rms);
}

}  // namespace audiomt
