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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "audiomt/audio.hpp"

// Linguistic-form perturbations on transcripts: homophone substitution and
// benign discontinuity (stutter-like repetition with stops), plus TF-IDF
// keyword selection to choose which words to target.
namespace audiomt::linguistic {

enum class Language { kEn, kZh };

std::string_view to_string(Language language);
Language parse_language(std::string_view text);

struct TokenSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Transcript {
  std::vector<std::string> tokens;
  Language language = Language::kEn;
  // Per-token spans into the paired audio, when known.
  std::optional<std::vector<TokenSpan>> alignment;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

Transcript make_transcript(std::string_view text,
                           Language language = Language::kEn);

// Joins tokens with single spaces; tokens equal to `stop_marker` attach to the
// preceding token ("a..." rather than "a ...").
std::string render(const Transcript& t, std::string_view stop_marker = "...");

// Throws DomainError unless the alignment (if any) has one span per token, is
// monotone, non-overlapping and ends within `duration_s`.
void validate_alignment(const Transcript& t, double duration_s);

// Matching key: ASCII-lowercased for English, verbatim otherwise.
std::string normalize(std::string_view token, Language language);

using WordSet = std::set<std::string>;

struct HomophoneCandidate {
  std::string replacement;
  // Higher ranks first; equal scores are ties.
  double score = 0.0;
};

class HomophoneLexicon {
 public:
  explicit HomophoneLexicon(Language language) : language_(language) {}

  // The English pairs fuck/folk, shit/sheet, dick/deck.
  static HomophoneLexicon english_default();

  // UTF-8, one entry per line: word<TAB>cand1,cand2,... where a candidate may
  // carry an explicit score as `cand:score`. Without scores, list order is the
  // rank. Blank lines and lines starting with '#' are skipped.
  static HomophoneLexicon load(const std::filesystem::path& path,
                               Language language);

  // Throws ParameterError when a candidate equals its key.
  void add(std::string_view word, std::vector<HomophoneCandidate> candidates);

  Language language() const noexcept { return language_; }
  const std::vector<HomophoneCandidate>* find(std::string_view word) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  Language language_;
  std::map<std::string, std::vector<HomophoneCandidate>> entries_;
};

struct SubstitutionResult {
  Transcript transcript;
  std::size_t substituted = 0;
  // Target occurrences with no lexicon entry; they pass through unchanged.
  std::size_t missing = 0;
};

// Replaces every target token that has a lexicon entry by its top-ranked
// candidate; rank ties are broken by a draw from `seed`. Token count and
// alignment are preserved.
SubstitutionResult homophone_substitute(const Transcript& t,
                                        const HomophoneLexicon& lexicon,
                                        const WordSet& targets,
                                        std::uint64_t seed);

// The token before each target is emitted `repeats` times, each copy followed
// by `stop_marker`; the target itself is untouched. Alignment is dropped.
Transcript benign_discontinuity_text(const Transcript& t,
                                     const WordSet& targets,
                                     std::string_view stop_marker,
                                     int repeats);

// Audio counterpart: the span of each token preceding a target is followed by
// `repeats` gaps of gap_s silence with repeats-1 further copies of the span
// between them. Requires an alignment (DomainError otherwise).
AudioBuffer benign_discontinuity_audio(const AudioBuffer& x,
                                       const Transcript& t,
                                       const WordSet& targets, double gap_s,
                                       int repeats);

struct KeywordScore {
  std::string token;
  double tf_idf = 0.0;
  std::size_t document_frequency = 0;
};

// ln((1 + documents) / (1 + document_frequency)) + 1
double smoothed_idf(std::size_t documents, std::size_t document_frequency);

// Scores each non-stopword token by its maximum raw-tf * smoothed-idf over the
// corpus and returns the top k (fewer if the vocabulary is smaller), ordered by
// score descending then token ascending.
std::vector<KeywordScore> select_keywords(std::span<const Transcript> corpus,
                                          const WordSet& stopwords, int k);

// One token per line: token[<TAB>start_s<TAB>end_s]. Alignment is attached
// only when every line carries both columns.
Transcript read_transcript(const std::filesystem::path& path,
                           Language language = Language::kEn);
void write_transcript(const Transcript& t, const std::filesystem::path& path);

WordSet read_stopwords(const std::filesystem::path& path,
                       Language language = Language::kEn);

// One document per line, whitespace-separated tokens.
std::vector<Transcript> read_corpus(const std::filesystem::path& path,
                                    Language language = Language::kEn);

}  // namespace audiomt::linguistic
