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

#include "audiomt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "audiomt/errors.hpp"

namespace audiomt {

bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw DomainError("fft size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence; keeps error flat
      // for large sizes.
      const std::complex<double> w(std::cos(angle * k), std::sin(angle * k));
      for (std::size_t start = 0; start < n; start += len) {
        const auto u = data[start + k];
        const auto v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= scale;
  }
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i /
                                static_cast<double>(length));
  }
  return w;
}

Spectrum magnitude_spectrum(const AudioBuffer& buffer, std::size_t fft_size) {
  if (!is_power_of_two(fft_size)) {
    throw DomainError("fft_size must be a power of two");
  }
  if (buffer.frames() < fft_size) {
    throw DomainError("buffer shorter than fft_size");
  }
  const auto mono = buffer.mixdown();
  const auto window = hann_window(fft_size);
  std::vector<std::complex<double>> bins(fft_size);
  for (std::size_t i = 0; i < fft_size; ++i) bins[i] = mono[i] * window[i];
  fft(bins);

  Spectrum out;
  out.resolution =
      static_cast<double>(buffer.sample_rate()) / static_cast<double>(fft_size);
  const std::size_t count = fft_size / 2 + 1;
  out.bin_frequencies.resize(count);
  out.magnitudes.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.bin_frequencies[k] = k * out.resolution;
    out.magnitudes[k] = std::abs(bins[k]);
  }
  return out;
}

double dominant_frequency(const AudioBuffer& buffer, std::size_t fft_size) {
  const auto spectrum = magnitude_spectrum(buffer, fft_size);
  const auto it = std::max_element(spectrum.magnitudes.begin(),
                                   spectrum.magnitudes.end());
  return spectrum.bin_frequencies[static_cast<std::size_t>(
      it - spectrum.magnitudes.begin())];
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  const std::size_t n = next_power_of_two(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fft(fa);
  fft(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft(fa, /*inverse=*/true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace audiomt
