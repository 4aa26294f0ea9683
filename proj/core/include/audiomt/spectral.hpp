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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "audiomt/audio.hpp"

namespace audiomt {

struct Spectrum {
  std::vector<double> bin_frequencies;  // Hz
  std::vector<double> magnitudes;
  double resolution = 0.0;  // Hz per bin: sample_rate / fft_size
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

// In-place iterative radix-2 transform. Size must be a power of two.
void fft(std::span<std::complex<double>> data, bool inverse = false);

// Periodic Hann window of the given length.
std::vector<double> hann_window(std::size_t length);

// Magnitude spectrum (bins 0..fft_size/2) of the Hann-windowed first
// `fft_size` frames of the channel mixdown. Throws DomainError when the buffer
// is shorter than fft_size or fft_size is not a power of two.
Spectrum magnitude_spectrum(const AudioBuffer& buffer, std::size_t fft_size);

// Bin-centre frequency of the largest magnitude in magnitude_spectrum.
double dominant_frequency(const AudioBuffer& buffer, std::size_t fft_size);

// Full linear convolution, length a.size() + b.size() - 1. Uses an FFT once
// both inputs are long enough to make it worthwhile.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b);

}  // namespace audiomt
