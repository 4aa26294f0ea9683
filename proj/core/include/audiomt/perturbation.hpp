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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "audiomt/linguistic.hpp"
#include "audiomt/mr_basic.hpp"
#include "audiomt/mr_compound.hpp"

namespace audiomt {

struct HomophoneSubstitution {
  std::uint64_t seed = 0;
};
struct DiscontinuityText {
  std::string marker = "...";
  int repeats = 3;
};
struct DiscontinuityAudio {
  double gap_s = 0.5;
  int repeats = 3;
};

// One entry of the relation catalog with its parameters. The JSON form is
// {"name": <mr name>, <param>: <value>, ...}; see mr_names().
using Perturbation =
    std::variant<basic::TimeStretch, basic::TimeShift, basic::Pan,
                 basic::Surround, basic::PitchShift, basic::NoiseInjection,
                 basic::RepeatSegment, basic::Gain, compound::Compression,
                 compound::RingMod, compound::BassBoost, compound::Tremolo,
                 compound::Distortion, compound::Echo, compound::Reverb,
                 HomophoneSubstitution, DiscontinuityText, DiscontinuityAudio>;

// CLI/config names in catalog order: time-stretch, time-shift, pan, surround,
// pitch-shift, noise, repeat, gain, compress, ring-mod, bass-boost, tremolo,
// distort, echo, reverb, homophone, discontinuity-text, discontinuity-audio.
const std::vector<std::string_view>& mr_names();

std::string_view mr_name(const Perturbation& p);
// Catalog identifier, e.g. "MR1-5" for gain or "MR2-2" for ring-mod.
std::string_view mr_id(const Perturbation& p);

// Canonical label such as "ring-mod(carrier_hz=30)"; used as the report key.
std::string mr_label(const Perturbation& p);

nlohmann::json to_json(const Perturbation& p);
// Throws ConfigError on an unknown name, unknown key or wrong type.
Perturbation perturbation_from_json(const nlohmann::json& j);

// True for relations whose direct output is a transcript for an external TTS.
bool produces_text(const Perturbation& p);
bool needs_transcript(const Perturbation& p);

struct LinguisticContext {
  const linguistic::HomophoneLexicon* lexicon = nullptr;
  linguistic::WordSet targets;
};

struct PerturbationOutput {
  std::optional<AudioBuffer> audio;
  std::optional<linguistic::Transcript> text;
};

PerturbationOutput apply_perturbation(const Perturbation& p,
                                      const AudioBuffer& audio,
                                      const linguistic::Transcript* transcript,
                                      const LinguisticContext& context);

}  // namespace audiomt
