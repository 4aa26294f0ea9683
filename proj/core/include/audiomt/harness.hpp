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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiomt/audio.hpp"
#include "audiomt/backend.hpp"
#include "audiomt/linguistic.hpp"
#include "audiomt/perturbation.hpp"
#include "audiomt/report.hpp"

// The campaign engine: seed filtering, test-case generation, backend queries,
// EFR aggregation, replay and retraining-data export.
namespace audiomt {

struct SeedSpec {
  std::string id;
  std::filesystem::path audio;
  std::optional<std::filesystem::path> transcript;
  Category category = Category::kInsult;  // declared ground truth, toxic
};

// External speech synthesis for text-producing relations. `command` is run
// through the shell after substituting {text} (a UTF-8 file holding the
// rendered transcript) and {wav} (where the synthesized audio must appear).
struct TtsConfig {
  std::string command;
};

struct CampaignConfig {
  std::vector<SeedSpec> seeds;
  std::vector<Perturbation> mrs;
  std::vector<nlohmann::json> backends;  // see make_backend()
  int workers = 4;
  std::filesystem::path output_dir;
  std::filesystem::path base_dir;  // relative paths in backends resolve here
  linguistic::Language language = linguistic::Language::kEn;
  std::optional<std::filesystem::path> lexicon;  // default: English pairs
  linguistic::WordSet targets;
  std::optional<TtsConfig> tts;
  // Previously synthesized audio keyed by text artifact name; used instead of
  // running the TTS command (replay).
  std::map<std::string, std::filesystem::path> synthesized;
};

// Validates a config document; relative paths resolve against `base_dir`.
// Throws ConfigError naming the offending field.
CampaignConfig parse_campaign_config(const nlohmann::json& doc,
                                     const std::filesystem::path& base_dir);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

// Backend specs:
//   {"name": "spotter", "kind": "keyword_spotter", "templates": "dir",
//    "threshold": 12.5, "window_s": 0, "hop_s": 0.02}
//   {"name": "replay", "kind": "fixture", "path": "fixture.json"}
//   {"name": "api", "kind": "http", "template": "api.json", "rate_limit": 5,
//    "retry": {"max_attempts": 3, "backoff_ms": 200}}
std::unique_ptr<ModerationBackend> make_backend(
    const nlohmann::json& spec, const std::filesystem::path& base_dir);

struct Seed {
  SeedSpec spec;
  AudioBuffer audio;
  std::optional<linguistic::Transcript> transcript;
  std::string digest;
};

Seed load_seed(const SeedSpec& spec, linguistic::Language language);

// A backend's answer, or the reason there is none.
struct Answer {
  std::optional<Verdict> verdict;
  std::string error;
};

struct SeedFilterResult {
  std::vector<std::vector<Answer>> answers;  // [seed][backend]
  std::vector<bool> retained;                // per seed
  SeedFilterReport report;
};

// A seed is retained iff at least one backend labels it with its declared
// category. Throws BackendUnavailableError when no query was answered at all.
SeedFilterResult filter_seeds(std::span<const Seed> seeds,
                              std::span<const ModerationBackend* const> backends,
                              int workers);

struct TestCase {
  std::string seed_id;
  std::size_t mr_index = 0;
  Category category = Category::kInsult;
  std::string artifact;       // relative to the output dir; empty if pending
  std::string digest;         // of the artifact audio
  std::string text_artifact;  // text relations only
  bool pending_tts = false;
  std::vector<Answer> seed_answers;  // per backend
  std::vector<Answer> answers;       // per backend, on the artifact
};

struct CampaignResult {
  CampaignReport report;
  std::vector<Perturbation> mrs;
  std::vector<std::string> backend_names;
  std::vector<TestCase> cases;
  std::filesystem::path output_dir;
};

// Runs the whole protocol against caller-owned backends and writes
// report.json, report.csv, manifest.json and artifacts/ into output_dir.
CampaignResult run_campaign(const CampaignConfig& config,
                            std::span<const ModerationBackend* const> backends);
// Builds the backends from config.backends.
CampaignResult run_campaign(const CampaignConfig& config);

// Re-runs a recorded campaign with fixture backends built from the verdicts
// in its manifest; the new report is byte-identical to the original.
CampaignResult replay_campaign(const std::filesystem::path& manifest,
                               const std::filesystem::path& output_dir,
                               int workers = 4);

// The recorded campaign a manifest describes (report excluded).
CampaignResult load_campaign(const std::filesystem::path& manifest);

struct DatasetEntry {
  std::string artifact;  // absolute path
  Category label = Category::kInsult;
  nlohmann::json mr;
  std::string seed_id;
  std::string split;  // "train", "test" or "unused"
};

struct DatasetManifest {
  double fraction = 0.2;
  std::uint64_t seed = 0;
  std::vector<DatasetEntry> entries;
};

// Per relation, cases are grouped by category and the smallest group sets the
// class size m. Each category contributes round(fraction * m) test cases and
// as many train cases (capped by what remains), so both splits are balanced
// across classes; the rest is tagged unused. Cases without audio are skipped.
// Throws ParameterError unless 0 < fraction < 1.
DatasetManifest export_retraining_set(const CampaignResult& campaign,
                                      double fraction, std::uint64_t seed);

nlohmann::ordered_json to_json(const DatasetManifest& manifest);

// Calls fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown stops further dispatch and is rethrown on the caller's thread.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace audiomt
