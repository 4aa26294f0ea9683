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

#include "audiomt/linguistic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "audiomt/errors.hpp"
#include "audiomt/rng.hpp"

namespace audiomt::linguistic {
namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

double parse_seconds(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw FormatError(where + ": invalid time value '" + text + "'");
  }
}

// Indices i such that token i + 1 is a target.
std::vector<std::size_t> discontinuity_sites(const Transcript& t,
                                             const WordSet& targets) {
  std::vector<std::size_t> sites;
  if (targets.empty()) return sites;
  WordSet keys;
  for (const auto& w : targets) keys.insert(normalize(w, t.language));
  for (std::size_t i = 0; i + 1 < t.tokens.size(); ++i) {
    if (keys.count(normalize(t.tokens[i + 1], t.language))) sites.push_back(i);
  }
  return sites;
}

}  // namespace

std::string_view to_string(Language language) {
  return language == Language::kEn ? "en" : "zh";
}

Language parse_language(std::string_view text) {
  const std::string key = normalize(text, Language::kEn);
  if (key == "en") return Language::kEn;
  if (key == "zh") return Language::kZh;
  throw ParameterError("unknown language '" + std::string(text) + "'");
}

std::string normalize(std::string_view token, Language language) {
  std::string out(token);
  if (language == Language::kEn) {
    for (char& c : out) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

Transcript make_transcript(std::string_view text, Language language) {
  Transcript t;
  t.language = language;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) t.tokens.push_back(token);
  return t;
}

std::string render(const Transcript& t, std::string_view stop_marker) {
  std::string out;
  for (const auto& token : t.tokens) {
    if (!out.empty() && !(token == stop_marker && !stop_marker.empty())) {
      out.push_back(' ');
    }
    out += token;
  }
  return out;
}

void validate_alignment(const Transcript& t, double duration_s) {
  if (!t.alignment) return;
  const auto& spans = *t.alignment;
  if (spans.size() != t.tokens.size()) {
    throw DomainError("alignment must have one span per token");
  }
  double previous_end = 0.0;
  for (const auto& span : spans) {
    if (!(span.start_s >= previous_end) || !(span.end_s >= span.start_s) ||
        span.end_s > duration_s + 1e-9) {
      throw DomainError(
          "alignment must be monotone, non-overlapping and within the audio");
    }
    previous_end = span.end_s;
  }
}

HomophoneLexicon HomophoneLexicon::english_default() {
  HomophoneLexicon lexicon(Language::kEn);
  lexicon.add("fuck", {{"folk", 0.0}});
  lexicon.add("shit", {{"sheet", 0.0}});
  lexicon.add("dick", {{"deck", 0.0}});
  return lexicon;
}

void HomophoneLexicon::add(std::string_view word,
                           std::vector<HomophoneCandidate> candidates) {
  const std::string key = normalize(trim(word), language_);
  if (key.empty()) throw ParameterError("empty lexicon key");
  for (const auto& c : candidates) {
    if (normalize(c.replacement, language_) == key) {
      throw ParameterError("lexicon candidate equals its key: " + key);
    }
    if (c.replacement.empty()) throw ParameterError("empty lexicon candidate");
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  entries_[key] = std::move(candidates);
}

const std::vector<HomophoneCandidate>* HomophoneLexicon::find(
    std::string_view word) const {
  const auto it = entries_.find(normalize(word, language_));
  return it == entries_.end() ? nullptr : &it->second;
}

HomophoneLexicon HomophoneLexicon::load(const std::filesystem::path& path,
                                        Language language) {
  auto in = open_text(path);
  HomophoneLexicon lexicon(language);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto tab = stripped.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected word<TAB>candidates");
    }
    std::vector<HomophoneCandidate> candidates;
    const auto fields = split(std::string_view(stripped).substr(tab + 1), ',');
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::string field = trim(fields[i]);
      if (field.empty()) continue;
      HomophoneCandidate c;
      const auto colon = field.rfind(':');
      if (colon != std::string::npos && colon + 1 < field.size()) {
        c.replacement = trim(field.substr(0, colon));
        c.score = parse_seconds(field.substr(colon + 1),
                                path.string() + ":" + std::to_string(line_no));
      } else {
        c.replacement = field;
        c.score = -static_cast<double>(i);
      }
      candidates.push_back(std::move(c));
    }
    if (candidates.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": no candidates");
    }
    lexicon.add(stripped.substr(0, tab), std::move(candidates));
  }
  return lexicon;
}

SubstitutionResult homophone_substitute(const Transcript& t,
                                        const HomophoneLexicon& lexicon,
                                        const WordSet& targets,
                                        std::uint64_t seed) {
  if (lexicon.language() != t.language) {
    throw DomainError("lexicon language does not match the transcript");
  }
  WordSet keys;
  for (const auto& w : targets) keys.insert(normalize(w, t.language));

  SubstitutionResult result{t, 0, 0};
  DeterministicRng rng(seed);
  for (auto& token : result.transcript.tokens) {
    if (!keys.count(normalize(token, t.language))) continue;
    const auto* candidates = lexicon.find(token);
    if (candidates == nullptr || candidates->empty()) {
      ++result.missing;
      continue;
    }
    const double best = candidates->front().score;
    std::size_t tied = 0;
    while (tied < candidates->size() && (*candidates)[tied].score == best) {
      ++tied;
    }
    token = (*candidates)[rng.below(tied)].replacement;
    ++result.substituted;
  }
  return result;
}

Transcript benign_discontinuity_text(const Transcript& t,
                                     const WordSet& targets,
                                     std::string_view stop_marker,
                                     int repeats) {
  if (repeats < 1) throw ParameterError("repeats must be >= 1");
  const auto sites = discontinuity_sites(t, targets);
  Transcript out;
  out.language = t.language;
  std::size_t next_site = 0;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (next_site < sites.size() && sites[next_site] == i) {
      for (int r = 0; r < repeats; ++r) {
        out.tokens.push_back(t.tokens[i]);
        out.tokens.emplace_back(stop_marker);
      }
      ++next_site;
    } else {
      out.tokens.push_back(t.tokens[i]);
    }
  }
  if (sites.empty()) out.alignment = t.alignment;
  return out;
}

AudioBuffer benign_discontinuity_audio(const AudioBuffer& x,
                                       const Transcript& t,
                                       const WordSet& targets, double gap_s,
                                       int repeats) {
  if (repeats < 1) throw ParameterError("repeats must be >= 1");
  if (!std::isfinite(gap_s) || gap_s < 0.0) {
    throw ParameterError("gap must be >= 0 seconds");
  }
  if (!t.alignment) {
    throw DomainError("audio discontinuity requires a word alignment");
  }
  validate_alignment(t, x.duration());
  const auto sites = discontinuity_sites(t, targets);
  if (sites.empty()) return x;

  const int rate = x.sample_rate();
  const auto to_frame = [&](double s) {
    return std::min(static_cast<std::size_t>(std::llround(s * rate)),
                    x.frames());
  };
  const auto gap = static_cast<std::size_t>(std::llround(gap_s * rate));

  std::vector<std::vector<double>> out(x.channel_count());
  for (std::size_t c = 0; c < x.channel_count(); ++c) {
    const auto ch = x.channel(c);
    auto& y = out[c];
    std::size_t copied = 0;
    for (const std::size_t site : sites) {
      const auto& span = (*t.alignment)[site];
      const std::size_t begin = to_frame(span.start_s);
      const std::size_t end = to_frame(span.end_s);
      y.insert(y.end(), ch.begin() + copied, ch.begin() + end);
      for (int r = 0; r < repeats; ++r) {
        y.insert(y.end(), gap, 0.0);
        if (r + 1 < repeats) y.insert(y.end(), ch.begin() + begin, ch.begin() + end);
      }
      copied = end;
    }
    y.insert(y.end(), ch.begin() + copied, ch.end());
  }
  return AudioBuffer(std::move(out), rate);
}

double smoothed_idf(std::size_t documents, std::size_t document_frequency) {
  return std::log((1.0 + static_cast<double>(documents)) /
                  (1.0 + static_cast<double>(document_frequency))) +
         1.0;
}

std::vector<KeywordScore> select_keywords(std::span<const Transcript> corpus,
                                          const WordSet& stopwords, int k) {
  if (corpus.empty()) throw DomainError("keyword selection on an empty corpus");
  if (k <= 0) throw ParameterError("k must be positive");

  std::vector<std::unordered_map<std::string, std::size_t>> counts;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    WordSet stop;
    for (const auto& w : stopwords) stop.insert(normalize(w, doc.language));
    auto& tf = counts.emplace_back();
    for (const auto& token : doc.tokens) {
      auto key = normalize(token, doc.language);
      if (key.empty() || stop.count(key)) continue;
      if (tf[key]++ == 0) ++df[key];
    }
  }

  std::unordered_map<std::string, double> best;
  for (const auto& tf : counts) {
    for (const auto& [token, count] : tf) {
      const double score =
          static_cast<double>(count) * smoothed_idf(corpus.size(), df[token]);
      auto [it, inserted] = best.emplace(token, score);
      if (!inserted) it->second = std::max(it->second, score);
    }
  }

  std::vector<KeywordScore> ranked;
  ranked.reserve(best.size());
  for (const auto& [token, score] : best) {
    ranked.push_back({token, score, df[token]});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.tf_idf != b.tf_idf) return a.tf_idf > b.tf_idf;
    return a.token < b.token;
  });
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(k);
  return ranked;
}

Transcript read_transcript(const std::filesystem::path& path,
                           Language language) {
  auto in = open_text(path);
  Transcript t;
  t.language = language;
  std::vector<TokenSpan> spans;
  bool aligned = true;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    t.tokens.push_back(trim(fields[0]));
    if (fields.size() >= 3) {
      const std::string where = path.string() + ":" + std::to_string(line_no);
      spans.push_back({parse_seconds(trim(fields[1]), where),
                       parse_seconds(trim(fields[2]), where)});
    } else {
      aligned = false;
    }
  }
  if (aligned && !t.tokens.empty()) t.alignment = std::move(spans);
  return t;
}

void write_transcript(const Transcript& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    out << t.tokens[i];
    if (t.alignment) {
      out << '\t' << (*t.alignment)[i].start_s << '\t' << (*t.alignment)[i].end_s;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

WordSet read_stopwords(const std::filesystem::path& path, Language language) {
  auto in = open_text(path);
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string word = trim(line);
    if (!word.empty()) words.insert(normalize(word, language));
  }
  return words;
}

std::vector<Transcript> read_corpus(const std::filesystem::path& path,
                                    Language language) {
  auto in = open_text(path);
  std::vector<Transcript> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    corpus.push_back(make_transcript(line, language));
  }
  return corpus;
}

}  // namespace audiomt::linguistic
