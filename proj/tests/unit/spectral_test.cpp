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

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "audiomt/errors.hpp"
#include "audiomt/spectral.hpp"
#include "signals.hpp"

namespace audiomt {
namespace {

std::vector<double> random_signal(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    const auto x = random_signal(n, static_cast<unsigned>(n));
    std::vector<std::complex<double>> z(x.begin(), x.end());
    fft(z);
    const auto oracle = testing::naive_dft_magnitude(x);
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      ASSERT_NEAR(std::abs(z[k]), oracle[k], 1e-9 * n) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Fft, InverseRoundTrip) {
  const auto x = random_signal(512, 3);
  std::vector<std::complex<double>> z(x.begin(), x.end());
  fft(z);
  fft(z, true);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(z[i].real(), x[i], 1e-12);
}

TEST(Fft, Parseval) {
  const auto x = random_signal(1024, 5);
  std::vector<std::complex<double>> z(x.begin(), x.end());
  fft(z);
  double time = 0.0, freq = 0.0;
  for (double v : x) time += v * v;
  for (const auto& c : z) freq += std::norm(c);
  EXPECT_NEAR(time, freq / x.size(), 1e-9 * time);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<std::complex<double>> z(12);
  EXPECT_THROW(fft(z), DomainError);
  EXPECT_TRUE(is_power_of_two(1024));
  EXPECT_FALSE(is_power_of_two(0));
  EXPECT_EQ(next_power_of_two(1000), 1024u);
  EXPECT_EQ(next_power_of_two(1024), 1024u);
}

TEST(Spectrum, DominantFrequencyWithinOneBin) {
  for (double hz : {220.0, 440.0, 1000.0, 3150.0}) {
    const auto x = testing::sine(hz, 1.0);
    const auto s = magnitude_spectrum(x, 8192);
    EXPECT_DOUBLE_EQ(s.resolution, 16000.0 / 8192);
    EXPECT_NEAR(dominant_frequency(x, 8192), hz, s.resolution);
  }
  EXPECT_THROW(magnitude_spectrum(testing::sine(440, 0.1), 8192), DomainError);
}

TEST(Window, HannIsPeriodic) {
  const auto w = hann_window(8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_NEAR(w[1], w[7], 1e-15);
}

TEST(Convolve, MatchesDirectSum) {
  for (auto [na, nb] : {std::pair{5u, 3u}, std::pair{300u, 200u}, std::pair{1u, 1000u}}) {
    const auto a = random_signal(na, 11);
    const auto b = random_signal(nb, 12);
    const auto y = convolve(a, b);
    ASSERT_EQ(y.size(), na + nb - 1);
    for (std::size_t n = 0; n < y.size(); n += 7) {
      double acc = 0.0;
      for (std::size_t k = 0; k < na; ++k) {
        if (n >= k && n - k < nb) acc += a[k] * b[n - k];
      }
      ASSERT_NEAR(y[n], acc, 1e-9);
    }
  }
}

}  // namespace
}  // namespace audiomt
