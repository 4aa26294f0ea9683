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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "audiomt/audio.hpp"
#include "audiomt/linguistic.hpp"

namespace audiomt {

enum class Category { kInsult, kPorn, kSpam, kNonToxic };

std::string_view to_string(Category category);
// Accepts insult, porn, spam, non_toxic. Throws ParameterError otherwise.
Category parse_category(std::string_view text);
inline bool is_toxic(Category c) { return c != Category::kNonToxic; }

struct Verdict {
  Category category = Category::kNonToxic;
  std::optional<double> confidence;  // in [0, 1] when present
  std::string raw;                   // provider payload, kept for audit

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

// A system under test. Implementations must tolerate concurrent moderate()
// calls from campaign workers.
class ModerationBackend {
 public:
  virtual ~ModerationBackend() = default;

  virtual const std::string& name() const noexcept = 0;

  // Exactly one verdict, or one of BackendUnavailableError /
  // MissingFixtureError / MappingError.
  virtual Verdict moderate(const AudioBuffer& audio,
                           const linguistic::Transcript* transcript_hint =
                               nullptr) const = 0;
};

// Replays recorded verdicts keyed by audio_digest().
class FixtureBackend final : public ModerationBackend {
 public:
  FixtureBackend(std::string name, std::map<std::string, Verdict> verdicts)
      : name_(std::move(name)), verdicts_(std::move(verdicts)) {}

  // JSON object: hex digest -> {"category": ..., "confidence": ..., "raw": ...}
  // with confidence and raw optional.
  static FixtureBackend load(std::string name,
                             const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const std::string& name() const noexcept override { return name_; }
  Verdict moderate(const AudioBuffer& audio,
                   const linguistic::Transcript* transcript_hint =
                       nullptr) const override;

  const std::map<std::string, Verdict>& verdicts() const noexcept {
    return verdicts_;
  }

 private:
  std::string name_;
  std::map<std::string, Verdict> verdicts_;
};

}  // namespace audiomt
