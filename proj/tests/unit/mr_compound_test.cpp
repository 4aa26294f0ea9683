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

#include <algorithm>
#include <cmath>

#include "audiomt/errors.hpp"
#include "audiomt/mr_basic.hpp"
#include "audiomt/mr_compound.hpp"
#include "audiomt/spectral.hpp"
#include "signals.hpp"

namespace audiomt::compound {
namespace {

using testing::sine;

constexpr int kRate = 16000;

using testing::envelope_period;
using testing::tail_peak;

TEST(Compress, FullScaleSineSettlesAtMinus15) {
  const auto y = compress(sine(1000.0, 2.0, kRate, 1.0), -20.0, 4.0);
  EXPECT_NEAR(testing::db(tail_peak(y, 1.0)), -15.0, 1.0);
}

TEST(Compress, BelowThresholdIsExactIdentity) {
  const auto x = sine(1000.0, 0.5, kRate, 0.05);  // about -26 dBFS
  EXPECT_EQ(compress(x, -20.0, 4.0), x);
  EXPECT_THROW(compress(x, 3.0, 4.0), ParameterError);
  EXPECT_THROW(compress(x, -20.0, 0.5), ParameterError);
}

TEST(RingMod, SidebandsAtDifferenceAndSum) {
  const auto y = ring_modulate(sine(440.0, 2.0, kRate, 0.8), 30.0);
  const auto s = magnitude_spectrum(y, 16384);
  const auto bin = [&](double hz) {
    return static_cast<std::size_t>(std::llround(hz / s.resolution));
  };
  const auto local_peak = [&](double hz) {
    std::size_t best = bin(hz) - 2;
    for (std::size_t k = bin(hz) - 2; k <= bin(hz) + 2; ++k) {
      if (s.magnitudes[k] > s.magnitudes[best]) best = k;
    }
    return best;
  };
  EXPECT_NEAR(s.bin_frequencies[local_peak(410.0)], 410.0, s.resolution);
  EXPECT_NEAR(s.bin_frequencies[local_peak(470.0)], 470.0, s.resolution);
  // The original tone is suppressed relative to the sidebands.
  EXPECT_LT(s.magnitudes[bin(440.0)], 0.05 * s.magnitudes[local_peak(410.0)]);
  const double top = dominant_frequency(y, 16384);
  EXPECT_TRUE(std::abs(top - 410.0) <= s.resolution ||
              std::abs(top - 470.0) <= s.resolution);
}

TEST(BassBoost, HighToneUntouchedLowToneLifted) {
  const double g = std::pow(10.0, 6.0 / 20.0);
  const auto high = sine(4000.0, 1.0, kRate, 0.1);
  const auto hy = bass_boost(high, 200.0, 6.0);
  EXPECT_NEAR(testing::db(rms(hy)[0] / rms(high)[0]), 0.0, 1.0);
  const auto low = sine(50.0, 2.0, kRate, 0.1);
  const auto ly = bass_boost(low, 200.0, 6.0);
  const double ratio = tail_peak(ly, 1.0) / tail_peak(low, 1.0);
  EXPECT_NEAR(ratio, 1.0 + g, 0.1 * (1.0 + g));
  EXPECT_THROW(bass_boost(low, 10.0, 6.0), ParameterError);
}

TEST(Tremolo, EnvelopePeriodAndPeakBound) {
  const auto x = sine(1000.0, 3.0, kRate, 0.9);
  const auto y = tremolo(x, 4.0, 0.8);
  EXPECT_NEAR(envelope_period(y, 0.1, 0.45), 0.25, 0.25 * 0.05);
  EXPECT_LE(peak(y), peak(x));
  EXPECT_THROW(tremolo(x, 0.1, 0.5), ParameterError);
  EXPECT_THROW(tremolo(x, 4.0, 0.0), ParameterError);
}

TEST(Distort, ClipStageAndThirdHarmonic) {
  const auto x = sine(200.0, 2.0, kRate, 1.0);
  EXPECT_DOUBLE_EQ(peak(basic::primitives::hard_clip(x, 0.5)), 0.5);
  EXPECT_DOUBLE_EQ(peak(distort(x, 0.5, 0.0, {1.0})), 0.5);

  const auto y = distort(x, 0.5, 0.5);
  const auto s = magnitude_spectrum(y, 16384);
  auto sorted = s.magnitudes;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double floor = sorted[sorted.size() / 2];
  const auto third = static_cast<std::size_t>(std::llround(600.0 / s.resolution));
  double h3 = 0.0;
  for (std::size_t k = third - 2; k <= third + 2; ++k) h3 = std::max(h3, s.magnitudes[k]);
  EXPECT_GE(testing::db(h3 / floor), 20.0);
  EXPECT_THROW(distort(x, 0.0, 0.5), ParameterError);
}

TEST(Distort, RampEndpoints) {
  const auto flat = AudioBuffer::mono(std::vector<double>(101, 0.25), 1000);
  const auto y = distort(flat, 1.0, 1.0, {1.0});
  EXPECT_DOUBLE_EQ(y.channel(0).front(), 0.25);
  EXPECT_DOUBLE_EQ(y.channel(0).back(), 0.5);
  EXPECT_DOUBLE_EQ(y.channel(0)[50], 0.25 * 1.5);
}

TEST(Echo, ImpulseTapsAtExactOffsets) {
  const int rate = 8000;
  const auto y = echo(testing::impulse(100, rate), 0.25, 0.5, 2);
  ASSERT_EQ(y.frames(), 100u + 2 * 2000);
  for (std::size_t i = 0; i < y.frames(); ++i) {
    const double expect = i == 0 ? 1.0 : i == 2000 ? 0.5 : i == 4000 ? 0.25 : 0.0;
    ASSERT_NEAR(y.channel(0)[i], expect, 1e-6) << i;
  }
  const auto x = sine(100, 0.1, rate, 0.5);
  EXPECT_EQ(echo(x, 0.1, 0.0, 3), x);
  EXPECT_THROW(echo(x, 0.1, 1.0, 1), ParameterError);
  EXPECT_THROW(echo(x, 30.0, 0.5, 3), ParameterError);
}

TEST(Reverb, ZeroIntensityIsIdentityOverOriginalSpan) {
  const auto x = sine(300.0, 0.5, kRate, 0.5);
  const auto y = reverb(x, 0.0, 0.3, 5);
  const auto ir = reverb_impulse_response(0.0, 0.3, 5, kRate);
  ASSERT_EQ(y.frames(), x.frames() + ir.size() - 1);
  for (std::size_t i = 0; i < x.frames(); ++i) {
    ASSERT_NEAR(y.channel(0)[i], x.channel(0)[i], 1e-12);
  }
  for (std::size_t i = x.frames(); i < y.frames(); ++i) {
    ASSERT_NEAR(y.channel(0)[i], 0.0, 1e-12);
  }
}

TEST(Reverb, SeedDeterministicAndDecaying) {
  const auto a = reverb_impulse_response(0.5, 1.0, 3, kRate);
  EXPECT_EQ(a, reverb_impulse_response(0.5, 1.0, 3, kRate));
  EXPECT_NE(a, reverb_impulse_response(0.5, 1.0, 4, kRate));
  EXPECT_EQ(a[0], 1.0);
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 1; i < 1600; ++i) head += a[i] * a[i];
  for (std::size_t i = a.size() - 1600; i < a.size(); ++i) tail += a[i] * a[i];
  EXPECT_GT(head, 100.0 * tail);
  EXPECT_THROW(reverb_impulse_response(0.5, 11.0, 0, kRate), ParameterError);
}

TEST(CompoundProperties, OutputsStayInRange) {
  const AudioBuffer x({sine(220.0, 0.5, 8000, 0.95).channels()[0],
                       sine(330.0, 0.5, 8000, 0.95).channels()[0]},
                      8000);
  const std::vector<CompoundPerturbation> ops = {
      Compression{-30.0, 10.0}, RingMod{500.0},    BassBoost{400.0, 40.0},
      Tremolo{20.0, 1.0},       Distortion{0.1, 5.0}, Echo{0.05, 0.9, 5},
      Reverb{2.0, 0.2, 1},
  };
  for (const auto& op : ops) {
    const auto y = apply(x, op);
    EXPECT_EQ(y.channel_count(), 2u);
    for (const auto& ch : y.channels()) {
      for (double v : ch) ASSERT_LE(std::abs(v), 1.0);
    }
  }
}

}  // namespace
}  // namespace audiomt::compound
