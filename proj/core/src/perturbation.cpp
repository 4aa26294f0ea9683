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

#include "audiomt/perturbation.hpp"

#include <tuple>
#include <utility>

#include "audiomt/errors.hpp"

namespace audiomt {
namespace {

using nlohmann::json;

template <class R>
struct Field {
  std::string_view key;
  R& ref;
};

template <class R>
Field<R> field(std::string_view key, R& ref) {
  return {key, ref};
}

template <class T>
struct MrTraits;

#define AUDIOMT_MR(Type, Name, Id, ...)                   \
  template <>                                              \
  struct MrTraits<Type> {                                  \
    static constexpr std::string_view name = Name;         \
    static constexpr std::string_view id = Id;             \
    static auto fields(auto& p) { return std::tuple{__VA_ARGS__}; } \
  };

AUDIOMT_MR(basic::TimeStretch, "time-stretch", "MR1-1", field("factor", p.factor))
AUDIOMT_MR(basic::TimeShift, "time-shift", "MR1-1", field("seconds", p.seconds))
AUDIOMT_MR(basic::Pan, "pan", "MR1-2", field("position", p.position))
AUDIOMT_MR(basic::Surround, "surround", "MR1-2",
           field("rotation_hz", p.rotation_hz))
AUDIOMT_MR(basic::PitchShift, "pitch-shift", "MR1-3",
           field("semitones", p.semitones))
AUDIOMT_MR(basic::NoiseInjection, "noise", "MR1-4",
           field("snr_db", p.target_snr_db), field("seed", p.seed))
AUDIOMT_MR(basic::RepeatSegment, "repeat", "MR1-4", field("start_s", p.start_s),
           field("end_s", p.end_s), field("count", p.count))
AUDIOMT_MR(basic::Gain, "gain", "MR1-5", field("db", p.db))
AUDIOMT_MR(compound::Compression, "compress", "MR2-1",
           field("threshold_db", p.threshold_db), field("ratio", p.ratio))
AUDIOMT_MR(compound::RingMod, "ring-mod", "MR2-2",
           field("carrier_hz", p.carrier_hz))
AUDIOMT_MR(compound::BassBoost, "bass-boost", "MR2-3",
           field("cutoff_hz", p.cutoff_hz), field("gain_db", p.gain_db))
AUDIOMT_MR(compound::Tremolo, "tremolo", "MR2-4", field("rate_hz", p.rate_hz),
           field("depth", p.depth))
AUDIOMT_MR(compound::Distortion, "distort", "MR2-5",
           field("clip_threshold", p.clip_threshold), field("drive", p.drive))
AUDIOMT_MR(compound::Echo, "echo", "MR2-6", field("delay_s", p.delay_s),
           field("decay", p.decay), field("taps", p.taps))
AUDIOMT_MR(compound::Reverb, "reverb", "MR2-7", field("intensity", p.intensity),
           field("duration_s", p.duration_s), field("seed", p.seed))
AUDIOMT_MR(HomophoneSubstitution, "homophone", "MR3-1", field("seed", p.seed))
AUDIOMT_MR(DiscontinuityText, "discontinuity-text", "MR3-2",
           field("marker", p.marker), field("repeats", p.repeats))
AUDIOMT_MR(DiscontinuityAudio, "discontinuity-audio", "MR3-2",
           field("gap_s", p.gap_s), field("repeats", p.repeats))

#undef AUDIOMT_MR

template <class T>
json fields_to_json(const T& p) {
  json out = json::object();
  out["name"] = MrTraits<T>::name;
  std::apply([&](auto... f) { ((out[std::string(f.key)] = f.ref), ...); },
             MrTraits<T>::fields(p));
  return out;
}

template <class T>
T fields_from_json(const json& j) {
  T p{};
  auto fields = MrTraits<T>::fields(p);
  for (const auto& [key, value] : j.items()) {
    if (key == "name") continue;
    bool known = false;
    std::apply([&](auto... f) { ((known = known || f.key == key), ...); },
               fields);
    if (!known) {
      throw ConfigError(key, "unknown parameter for " +
                                 std::string(MrTraits<T>::name));
    }
  }
  std::apply(
      [&](auto... f) {
        (
            [&] {
              const std::string key(f.key);
              if (!j.contains(key)) return;
              try {
                f.ref = j.at(key).template get<std::remove_cvref_t<decltype(f.ref)>>();
              } catch (const json::exception& e) {
                throw ConfigError(key, e.what());
              }
            }(),
            ...);
      },
      fields);
  return p;
}

template <std::size_t... I>
Perturbation from_name(std::string_view name, const json& j,
                       std::index_sequence<I...>) {
  std::optional<Perturbation> out;
  (
      [&] {
        using T = std::variant_alternative_t<I, Perturbation>;
        if (!out && MrTraits<T>::name == name) out = fields_from_json<T>(j);
      }(),
      ...);
  if (!out) throw ConfigError("name", "unknown MR '" + std::string(name) + "'");
  return *out;
}

template <std::size_t... I>
std::vector<std::string_view> all_names(std::index_sequence<I...>) {
  return {MrTraits<std::variant_alternative_t<I, Perturbation>>::name...};
}

}  // namespace

const std::vector<std::string_view>& mr_names() {
  static const auto names = all_names(
      std::make_index_sequence<std::variant_size_v<Perturbation>>{});
  return names;
}

std::string_view mr_name(const Perturbation& p) {
  return std::visit(
      [](const auto& op) {
        return MrTraits<std::decay_t<decltype(op)>>::name;
      },
      p);
}

std::string_view mr_id(const Perturbation& p) {
  return std::visit(
      [](const auto& op) { return MrTraits<std::decay_t<decltype(op)>>::id; },
      p);
}

std::string mr_label(const Perturbation& p) {
  const json j = to_json(p);
  std::string out(mr_name(p));
  std::string params;
  std::visit(
      [&](const auto& op) {
        std::apply(
            [&](auto... f) {
              ((params += (params.empty() ? "" : ",") + std::string(f.key) +
                          "=" + j.at(std::string(f.key)).dump()),
               ...);
            },
            MrTraits<std::decay_t<decltype(op)>>::fields(op));
      },
      p);
  return out + "(" + params + ")";
}

json to_json(const Perturbation& p) {
  return std::visit([](const auto& op) { return fields_to_json(op); }, p);
}

Perturbation perturbation_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("mr", "expected an object");
  if (!j.contains("name") || !j["name"].is_string()) {
    throw ConfigError("name", "missing MR name");
  }
  return from_name(j["name"].get<std::string>(), j,
                   std::make_index_sequence<std::variant_size_v<Perturbation>>{});
}

bool produces_text(const Perturbation& p) {
  return std::holds_alternative<HomophoneSubstitution>(p) ||
         std::holds_alternative<DiscontinuityText>(p);
}

bool needs_transcript(const Perturbation& p) {
  return produces_text(p) || std::holds_alternative<DiscontinuityAudio>(p);
}

PerturbationOutput apply_perturbation(const Perturbation& p,
                                      const AudioBuffer& audio,
                                      const linguistic::Transcript* transcript,
                                      const LinguisticContext& context) {
  if (needs_transcript(p) && transcript == nullptr) {
    throw DomainError(std::string(mr_name(p)) + " needs a transcript");
  }
  return std::visit(
      [&](const auto& op) -> PerturbationOutput {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, HomophoneSubstitution>) {
          if (context.lexicon == nullptr) {
            throw DomainError("homophone substitution needs a lexicon");
          }
          return {std::nullopt,
                  linguistic::homophone_substitute(*transcript, *context.lexicon,
                                                   context.targets, op.seed)
                      .transcript};
        } else if constexpr (std::is_same_v<T, DiscontinuityText>) {
          return {std::nullopt,
                  linguistic::benign_discontinuity_text(
                      *transcript, context.targets, op.marker, op.repeats)};
        } else if constexpr (std::is_same_v<T, DiscontinuityAudio>) {
          return {linguistic::benign_discontinuity_audio(
                      audio, *transcript, context.targets, op.gap_s, op.repeats),
                  std::nullopt};
        } else if constexpr (std::is_constructible_v<basic::BasicPerturbation, T>) {
          return {basic::apply(audio, op), std::nullopt};
        } else {
          return {compound::apply(audio, op), std::nullopt};
        }
      },
      p);
}

}  // namespace audiomt
