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
#include <optional>
#include <span>
#include <vector>

namespace audiomt {

// Uniformly sampled PCM audio held as double-precision samples, nominally in
// [-1, +1]. One or two channels of identical length. Immutable once built.
class AudioBuffer {
 public:
  AudioBuffer() = default;

  // Throws DomainError when channel lengths differ, the channel count is not 1
  // or 2, the rate is not positive, or any sample is non-finite.
  AudioBuffer(std::vector<std::vector<double>> channels, int sample_rate);

  static AudioBuffer mono(std::vector<double> samples, int sample_rate);
  static AudioBuffer silence(std::size_t frames, int sample_rate,
                             std::size_t channels = 1);

  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t frames() const noexcept {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  int sample_rate() const noexcept { return sample_rate_; }
  double duration() const noexcept {
    return sample_rate_ > 0 ? static_cast<double>(frames()) / sample_rate_
                            : 0.0;
  }
  bool empty() const noexcept { return frames() == 0; }

  std::span<const double> channel(std::size_t index) const {
    return channels_.at(index);
  }
  const std::vector<std::vector<double>>& channels() const noexcept {
    return channels_;
  }

  // Average of all channels.
  std::vector<double> mixdown() const;

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_ = 0;
};

// Hard clamp into [-1, +1]; the single clipping policy used everywhere.
double clamp_sample(double value) noexcept;
AudioBuffer clamped(const AudioBuffer& buffer);

// Per-channel root-mean-square. Throws DomainError on an empty buffer.
std::vector<double> rms(const AudioBuffer& buffer);
double rms(std::span<const double> samples);
// RMS pooled over every sample of every channel.
double pooled_rms(const AudioBuffer& buffer);

double peak(const AudioBuffer& buffer) noexcept;

// 20*log10(rms(signal) / rms(noisy - signal)), pooled over channels.
// Returns nullopt when the two buffers are identical (no noise present).
// Throws DomainError on shape mismatch or an empty/silent signal.
std::optional<double> measure_snr(const AudioBuffer& signal,
                                  const AudioBuffer& noisy);

}  // namespace audiomt
