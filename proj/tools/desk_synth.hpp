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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "audiomt/audio.hpp"
#include "audiomt/backend.hpp"
#include "audiomt/linguistic.hpp"

// A toy formant synthesizer standing in for recorded speech. Every word gets a
// fixed recipe derived from its spelling, so the same word always "sounds"
// alike up to the speaker's voice, and different words (including homophone
// replacements) sound different.
namespace audiomt::desk {

inline constexpr int kSampleRate = 16000;

struct Voice {
  double pitch = 1.0;    // scales f0
  double formant = 1.0;  // scales the vocal-tract resonances
  double tempo = 1.0;    // >1 speaks faster
};

AudioBuffer speak_word(std::string_view word, const Voice& voice);

struct Utterance {
  AudioBuffer audio;
  linguistic::Transcript transcript;  // aligned
};

// Words separated by `pause_s`; a token ending in "..." is spoken without the
// marker and followed by a longer stop.
Utterance speak(const std::vector<std::string>& tokens, const Voice& voice,
                double pause_s = 0.06, double edge_s = 0.15);

struct Keyword {
  Category tag;
  std::string word;
};
const std::vector<Keyword>& keywords();

// Writes templates/, seeds/, calibration/, lexicon.tsv and the demo campaign
// configs into `dir`. Calibrates the spotter and records a replay fixture by
// running the spotter campaign once.
void generate_corpus(const std::filesystem::path& dir);

}  // namespace audiomt::desk
