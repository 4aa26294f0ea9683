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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "audiomt/audio.hpp"
#include "audiomt/backend.hpp"

// Reference system under test: MFCC features matched against keyword
// templates with dynamic time warping.
namespace audiomt::spotter {

struct MfccOptions {
  double frame_s = 0.025;
  double hop_s = 0.010;
  double pre_emphasis = 0.97;
  std::size_t mel_filters = 26;
  double low_hz = 0.0;
  double high_hz = 8000.0;  // capped at Nyquist
  std::size_t coefficients = 13;
};

using FeatureFrame = std::vector<double>;
using FeatureSequence = std::vector<FeatureFrame>;

struct MfccSequence {
  FeatureSequence frames;  // each of `coefficients` values
  double frame_hop_s = 0.0;
};

// Mono mixdown -> pre-emphasis -> 25 ms Hamming frames every 10 ms -> power
// spectrum -> mel filterbank -> natural log -> orthonormal DCT-II.
// Yields floor((frames - frame_len) / hop) + 1 vectors.
// Throws DomainError when the clip is shorter than one frame.
MfccSequence extract_mfcc(const AudioBuffer& audio, const MfccOptions& options = {});

// Coefficients 1..N-1; the level-carrying coefficient 0 is dropped so
// matching is insensitive to overall gain.
FeatureSequence without_energy(const MfccSequence& mfcc);

// Minimum-cost monotone alignment (steps (1,0), (0,1), (1,1)) under Euclidean
// frame distance, divided by the length of that path. Among equal-cost paths
// the longest is taken. Throws DomainError on empty input.
double dtw_distance(std::span<const FeatureFrame> a,
                    std::span<const FeatureFrame> b);

struct KeywordTemplate {
  Category tag = Category::kInsult;
  std::string word;
  FeatureSequence features;  // coefficients 1..12
};

KeywordTemplate make_template(Category tag, std::string word,
                              const AudioBuffer& audio);

// Loads every `<tag>__<word>.wav` in a directory, sorted by file name.
std::vector<KeywordTemplate> load_templates(const std::filesystem::path& dir);

struct SpotResult {
  double distance = 0.0;  // min over windows and templates
  std::size_t template_index = 0;
  std::size_t window_start = 0;  // feature frame
};

// window_s <= 0 uses each template's own length as the window.
struct SpotterWindow {
  double window_s = 0.0;
  double hop_s = 0.01;
};

SpotResult best_match(const AudioBuffer& audio,
                      std::span<const KeywordTemplate> templates,
                      const SpotterWindow& window);

// Slides a window over the clip's features; when the best DTW distance is
// below `threshold` the matching template's tag is returned with confidence
// 1 - distance/threshold, otherwise non_toxic. Templates longer than the clip
// are skipped; DomainError when none fits, ParameterError on empty templates.
Verdict spot_keywords(const AudioBuffer& audio,
                      std::span<const KeywordTemplate> templates,
                      const SpotterWindow& window, double threshold);

// A clip too short for every template is answered non_toxic.
class KeywordSpotterBackend final : public ModerationBackend {
 public:
  KeywordSpotterBackend(std::string name,
                        std::vector<KeywordTemplate> templates,
                        SpotterWindow window, double threshold);

  const std::string& name() const noexcept override { return name_; }
  Verdict moderate(const AudioBuffer& audio,
                   const linguistic::Transcript* transcript_hint =
                       nullptr) const override;

 private:
  std::string name_;
  std::vector<KeywordTemplate> templates_;
  SpotterWindow window_;
  double threshold_;
};

struct LabeledClip {
  std::string id;
  Category label = Category::kNonToxic;
  AudioBuffer audio;
};

// Every `<label>__<name>.wav` in a directory.
std::vector<LabeledClip> load_labeled_clips(const std::filesystem::path& dir);

struct Calibration {
  double threshold = 0.0;
  double accuracy = 0.0;  // on the supplied clips, in [0, 1]
  std::vector<double> distances;  // per clip, input order
};

// Picks the threshold maximising accuracy of spot_keywords over `clips`;
// among equally accurate intervals the widest one wins and its midpoint is
// returned.
Calibration calibrate_threshold(std::span<const KeywordTemplate> templates,
                                std::span<const LabeledClip> clips,
                                const SpotterWindow& window);

}  // namespace audiomt::spotter
