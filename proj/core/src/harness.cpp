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

#include "audiomt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"
#include "audiomt/http_backend.hpp"
#include "audiomt/rng.hpp"
#include "audiomt/spotter.hpp"
#include "audiomt/version.hpp"
#include "audiomt/wav.hpp"

namespace audiomt {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kArtifactDir = "artifacts";

void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
  const std::string field = where.empty() ? key : where + "." + key;
  if (!obj.contains(key)) throw ConfigError(field, "required");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

template <typename T>
T get_field_or(const json& obj, const std::string& key, T fallback,
               const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return get_field<T>(obj, key, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw IoError("cannot write " + path.string());
  }
}

std::string unique_suffix() {
  std::ostringstream s;
  s << ".tmp." << std::this_thread::get_id();
  return s.str();
}

// Content-addressed store; a concurrent duplicate write lands the same bytes.
std::string store_wav(const fs::path& root, const AudioBuffer& audio,
                      const std::string& digest) {
  const std::string name = std::string(kArtifactDir) + "/" + digest + ".wav";
  const fs::path target = root / name;
  if (fs::exists(target)) return name;
  fs::path tmp = target;
  tmp += unique_suffix();
  write_wav(audio, tmp);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot store " + target.string() + ": " + ec.message());
  return name;
}

std::string store_text(const fs::path& root, const std::string& text) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const std::string name = std::string(kArtifactDir) + "/" +
                           sha256_hex({bytes, text.size()}) + ".txt";
  const fs::path target = root / name;
  if (fs::exists(target)) return name;
  fs::path tmp = target;
  tmp += unique_suffix();
  write_text_file(tmp, text);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot store " + target.string() + ": " + ec.message());
  return name;
}

Answer ask(const ModerationBackend& backend, const AudioBuffer& audio,
           const linguistic::Transcript* hint) {
  try {
    return {backend.moderate(audio, hint), {}};
  } catch (const BackendUnavailableError& e) {
    return {std::nullopt, e.what()};
  } catch (const MissingFixtureError& e) {
    return {std::nullopt, e.what()};
  } catch (const MappingError& e) {
    return {std::nullopt, e.what()};
  }
}

ordered_json answer_to_json(const std::string& backend, const Answer& a) {
  ordered_json j;
  j["backend"] = backend;
  if (a.verdict) {
    j["category"] = to_string(a.verdict->category);
    j["confidence"] = a.verdict->confidence ? ordered_json(*a.verdict->confidence)
                                            : ordered_json(nullptr);
    j["raw"] = a.verdict->raw;
  } else {
    j["category"] = nullptr;
    j["error"] = a.error;
  }
  return j;
}

Answer answer_from_json(const json& j) {
  Answer a;
  if (j.at("category").is_null()) {
    a.error = j.value("error", std::string("unanswered"));
    return a;
  }
  Verdict v;
  v.category = parse_category(j.at("category").get<std::string>());
  if (j.contains("confidence") && !j["confidence"].is_null()) {
    v.confidence = j["confidence"].get<double>();
  }
  v.raw = j.value("raw", std::string());
  a.verdict = std::move(v);
  return a;
}

std::vector<Category> present_categories(const std::vector<Seed>& seeds,
                                         const std::vector<bool>* mask) {
  std::set<Category> found;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (mask == nullptr || (*mask)[i]) found.insert(seeds[i].spec.category);
  }
  return {found.begin(), found.end()};
}

void write_outputs(const fs::path& dir, const CampaignReport& report,
                   const ordered_json& manifest) {
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text_file(dir / "report.json", report_json_text(report));
  write_text_file(dir / "report.csv", report_csv(report));
}

linguistic::HomophoneLexicon make_lexicon(const CampaignConfig& config) {
  if (config.lexicon) {
    return linguistic::HomophoneLexicon::load(*config.lexicon, config.language);
  }
  if (config.language == linguistic::Language::kEn) {
    return linguistic::HomophoneLexicon::english_default();
  }
  return linguistic::HomophoneLexicon(config.language);
}

}  // namespace

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ParameterError("worker count must be >= 1");
  const std::size_t threads = std::min<std::size_t>(workers, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

CampaignConfig parse_campaign_config(const json& doc, const fs::path& base_dir) {
  expect_keys(doc,
              {"$schema", "description", "seeds", "mrs", "backends", "workers",
               "output_dir", "language", "lexicon", "targets", "tts"},
              "");
  CampaignConfig c;
  c.base_dir = base_dir;
  c.language = linguistic::parse_language(
      get_field_or<std::string>(doc, "language", "en", ""));

  if (!doc.contains("seeds")) throw ConfigError("seeds", "required");
  const json& seeds = doc["seeds"];
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError("seeds", "must be a nonempty array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string where = "seeds[" + std::to_string(i) + "]";
    expect_keys(seeds[i], {"id", "audio", "transcript", "category"}, where);
    SeedSpec s;
    s.id = get_field<std::string>(seeds[i], "id", where);
    if (s.id.empty() || !ids.insert(s.id).second) {
      throw ConfigError(where + ".id", "must be nonempty and unique");
    }
    s.audio = resolve(base_dir, get_field<std::string>(seeds[i], "audio", where));
    if (seeds[i].contains("transcript")) {
      s.transcript =
          resolve(base_dir, get_field<std::string>(seeds[i], "transcript", where));
    }
    try {
      s.category =
          parse_category(get_field<std::string>(seeds[i], "category", where));
    } catch (const ParameterError& e) {
      throw ConfigError(where + ".category", e.what());
    }
    if (!is_toxic(s.category)) {
      throw ConfigError(where + ".category", "seed category must be toxic");
    }
    c.seeds.push_back(std::move(s));
  }

  if (!doc.contains("mrs")) throw ConfigError("mrs", "required");
  const json& mrs = doc["mrs"];
  if (!mrs.is_array() || mrs.empty()) {
    throw ConfigError("mrs", "must be a nonempty array");
  }
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    const std::string where = "mrs[" + std::to_string(i) + "]";
    try {
      c.mrs.push_back(perturbation_from_json(mrs[i]));
    } catch (const ConfigError& e) {
      throw ConfigError(where + "." + e.field(), e.what());
    } catch (const Error& e) {
      throw ConfigError(where, e.what());
    }
  }

  if (!doc.contains("backends")) throw ConfigError("backends", "required");
  const json& backends = doc["backends"];
  if (!backends.is_array() || backends.empty()) {
    throw ConfigError("backends", "must be a nonempty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < backends.size(); ++i) {
    const std::string where = "backends[" + std::to_string(i) + "]";
    if (!backends[i].is_object()) throw ConfigError(where, "expected an object");
    const auto name = get_field<std::string>(backends[i], "name", where);
    if (name.empty() || !names.insert(name).second) {
      throw ConfigError(where + ".name", "must be nonempty and unique");
    }
    const auto kind = get_field<std::string>(backends[i], "kind", where);
    if (kind != "keyword_spotter" && kind != "fixture" && kind != "http") {
      throw ConfigError(where + ".kind",
                        "expected keyword_spotter, fixture or http");
    }
    c.backends.push_back(backends[i]);
  }

  c.workers = get_field_or<int>(doc, "workers", 4, "");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  c.output_dir = resolve(
      base_dir, get_field_or<std::string>(doc, "output_dir", "campaign_out", ""));
  if (doc.contains("lexicon")) {
    c.lexicon = resolve(base_dir, get_field<std::string>(doc, "lexicon", ""));
  }
  for (const auto& t :
       get_field_or<std::vector<std::string>>(doc, "targets", {}, "")) {
    c.targets.insert(linguistic::normalize(t, c.language));
  }
  if (doc.contains("tts")) {
    expect_keys(doc["tts"], {"command"}, "tts");
    TtsConfig tts{get_field<std::string>(doc["tts"], "command", "tts")};
    if (tts.command.find("{text}") == std::string::npos ||
        tts.command.find("{wav}") == std::string::npos) {
      throw ConfigError("tts.command", "must contain {text} and {wav}");
    }
    c.tts = std::move(tts);
  }

  for (std::size_t m = 0; m < c.mrs.size(); ++m) {
    if (!needs_transcript(c.mrs[m])) continue;
    if (c.targets.empty()) {
      throw ConfigError("targets", std::string(mr_name(c.mrs[m])) +
                                       " needs target words");
    }
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      if (!c.seeds[i].transcript) {
        throw ConfigError("seeds[" + std::to_string(i) + "].transcript",
                          std::string(mr_name(c.mrs[m])) +
                              " needs a transcript for every seed");
      }
    }
  }
  return c;
}

CampaignConfig load_campaign_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", e.what());
  }
  return parse_campaign_config(doc, path.parent_path());
}

std::unique_ptr<ModerationBackend> make_backend(const json& spec,
                                                const fs::path& base_dir) {
  const auto name = get_field<std::string>(spec, "name", "backend");
  const std::string where = "backends." + name;
  const auto kind = get_field<std::string>(spec, "kind", where);
  if (kind == "keyword_spotter") {
    expect_keys(spec, {"name", "kind", "templates", "threshold", "window_s", "hop_s"},
                where);
    const auto dir =
        resolve(base_dir, get_field<std::string>(spec, "templates", where));
    const auto threshold = get_field<double>(spec, "threshold", where);
    if (!(threshold > 0.0)) {
      throw ConfigError(where + ".threshold", "must be > 0 (run calibrate)");
    }
    spotter::SpotterWindow window;
    window.window_s = get_field_or<double>(spec, "window_s", 0.0, where);
    window.hop_s = get_field_or<double>(spec, "hop_s", 0.01, where);
    if (!(window.hop_s > 0.0)) throw ConfigError(where + ".hop_s", "must be > 0");
    return std::make_unique<spotter::KeywordSpotterBackend>(
        name, spotter::load_templates(dir), window, threshold);
  }
  if (kind == "fixture") {
    expect_keys(spec, {"name", "kind", "path"}, where);
    return std::make_unique<FixtureBackend>(FixtureBackend::load(
        name, resolve(base_dir, get_field<std::string>(spec, "path", where))));
  }
  if (kind == "http") {
    expect_keys(spec, {"name", "kind", "template", "rate_limit", "retry"}, where);
    if (!spec.contains("template")) throw ConfigError(where + ".template", "required");
    const json& t = spec["template"];
    HttpTemplate tmpl;
    if (t.is_string()) {
      tmpl = HttpTemplate::load(resolve(base_dir, t.get<std::string>()));
    } else if (t.is_object()) {
      tmpl = HttpTemplate::from_json_text(t.dump());
    } else {
      throw ConfigError(where + ".template", "expected a path or an object");
    }
    const auto rate = get_field<double>(spec, "rate_limit", where);
    if (!(rate > 0.0)) throw ConfigError(where + ".rate_limit", "must be > 0");
    RetryPolicy retry;
    if (spec.contains("retry")) {
      const std::string rw = where + ".retry";
      expect_keys(spec["retry"], {"max_attempts", "backoff_ms", "multiplier"}, rw);
      retry.max_attempts =
          get_field_or<int>(spec["retry"], "max_attempts", retry.max_attempts, rw);
      retry.backoff = std::chrono::milliseconds(get_field_or<long long>(
          spec["retry"], "backoff_ms", retry.backoff.count(), rw));
      retry.multiplier =
          get_field_or<double>(spec["retry"], "multiplier", retry.multiplier, rw);
      if (retry.max_attempts < 1) {
        throw ConfigError(rw + ".max_attempts", "must be >= 1");
      }
    }
    return std::make_unique<HttpBackend>(name, std::move(tmpl), rate, retry);
  }
  throw ConfigError(where + ".kind", "expected keyword_spotter, fixture or http");
}

Seed load_seed(const SeedSpec& spec, linguistic::Language language) {
  Seed s{spec, read_wav(spec.audio), std::nullopt, {}};
  if (spec.transcript) {
    s.transcript = linguistic::read_transcript(*spec.transcript, language);
    linguistic::validate_alignment(*s.transcript, s.audio.duration());
  }
  s.digest = audio_digest(s.audio);
  return s;
}

SeedFilterResult filter_seeds(std::span<const Seed> seeds,
                              std::span<const ModerationBackend* const> backends,
                              int workers) {
  if (backends.empty()) throw ParameterError("no backends");
  const std::size_t nb = backends.size();
  SeedFilterResult out;
  out.answers.assign(seeds.size(), std::vector<Answer>(nb));
  parallel_for(seeds.size() * nb, workers, [&](std::size_t task) {
    const std::size_t s = task / nb, b = task % nb;
    out.answers[s][b] = ask(*backends[b], seeds[s].audio, nullptr);
  });

  bool any_answer = false;
  out.retained.assign(seeds.size(), false);
  auto& rep = out.report;
  rep.originals = seeds.size();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (const auto& a : out.answers[s]) {
      any_answer = any_answer || a.verdict.has_value();
      if (a.verdict && a.verdict->category == seeds[s].spec.category) {
        out.retained[s] = true;
      }
    }
    if (out.retained[s]) {
      ++rep.retained;
    } else {
      rep.excluded.push_back(seeds[s].spec.id);
    }
  }
  if (!seeds.empty() && !any_answer) {
    throw BackendUnavailableError("no backend answered any seed query");
  }

  std::set<Category> categories;
  for (const auto& s : seeds) categories.insert(s.spec.category);
  for (std::size_t b = 0; b < nb; ++b) {
    for (Category c : categories) {
      BackendFilterStats st{backends[b]->name(), c, 0, 0, 0};
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (seeds[s].spec.category != c) continue;
        ++st.originals;
        const Answer& a = out.answers[s][b];
        if (!a.verdict) {
          ++st.unanswered;
        } else if (a.verdict->category == c) {
          ++st.flagged;
        }
      }
      rep.per_backend.push_back(std::move(st));
    }
  }
  return out;
}

CampaignResult run_campaign(const CampaignConfig& config,
                            std::span<const ModerationBackend* const> backends) {
  if (config.seeds.empty()) throw ConfigError("seeds", "must be nonempty");
  if (config.mrs.empty()) throw ConfigError("mrs", "must be nonempty");
  if (backends.empty()) throw ConfigError("backends", "must be nonempty");

  const fs::path root = config.output_dir;
  std::error_code ec;
  fs::create_directories(root / kArtifactDir, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

  std::vector<Seed> seeds;
  seeds.reserve(config.seeds.size());
  for (const auto& spec : config.seeds) {
    seeds.push_back(load_seed(spec, config.language));
  }
  const auto lexicon = make_lexicon(config);
  const LinguisticContext context{&lexicon, config.targets};

  CampaignResult result;
  result.mrs = config.mrs;
  result.output_dir = root;
  for (const auto* b : backends) result.backend_names.push_back(b->name());
  const std::size_t nb = backends.size();

  const SeedFilterResult filter =
      filter_seeds(seeds, backends, config.workers);

  std::vector<std::size_t> retained;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (filter.retained[s]) retained.push_back(s);
  }

  // Generation: one task per retained seed x relation.
  const std::size_t nm = config.mrs.size();
  std::vector<TestCase> cases(retained.size() * nm);
  std::vector<std::optional<AudioBuffer>> audio(cases.size());
  std::vector<std::optional<linguistic::Transcript>> hints(cases.size());
  parallel_for(cases.size(), config.workers, [&](std::size_t task) {
    const Seed& seed = seeds[retained[task / nm]];
    const std::size_t m = task % nm;
    TestCase& tc = cases[task];
    tc.seed_id = seed.spec.id;
    tc.mr_index = m;
    tc.category = seed.spec.category;
    tc.seed_answers = filter.answers[retained[task / nm]];

    auto out = apply_perturbation(config.mrs[m], seed.audio,
                                  seed.transcript ? &*seed.transcript : nullptr,
                                  context);
    if (out.text) {
      const std::string text = linguistic::render(*out.text) + "\n";
      tc.text_artifact = store_text(root, text);
      const auto recorded = config.synthesized.find(tc.text_artifact);
      if (recorded != config.synthesized.end()) {
        out.audio = read_wav(recorded->second);
      } else if (config.tts) {
        const fs::path wav = root / (tc.text_artifact + ".tts" + unique_suffix() + ".wav");
        const std::string cmd =
            replace_all(replace_all(config.tts->command, "{text}",
                                    shell_quote((root / tc.text_artifact).string())),
                        "{wav}", shell_quote(wav.string()));
        if (std::system(cmd.c_str()) != 0 || !fs::exists(wav)) {
          throw IoError("tts command failed for " + tc.text_artifact);
        }
        out.audio = read_wav(wav);
        fs::remove(wav, ec);
      } else {
        tc.pending_tts = true;
        return;
      }
      hints[task] = *out.text;
    }
    AudioBuffer q = quantized(*out.audio);
    tc.digest = audio_digest(q);
    tc.artifact = store_wav(root, q, tc.digest);
    audio[task] = std::move(q);
  });

  // Queries: one task per case x backend.
  for (auto& tc : cases) {
    if (!tc.pending_tts) tc.answers.resize(nb);
  }
  parallel_for(cases.size() * nb, config.workers, [&](std::size_t task) {
    const std::size_t c = task / nb, b = task % nb;
    if (!audio[c]) return;
    cases[c].answers[b] =
        ask(*backends[b], *audio[c], hints[c] ? &*hints[c] : nullptr);
  });

  // Aggregation.
  CampaignReport& report = result.report;
  report.version = kBuildIdentifier;
  report.seed_filter = filter.report;
  report.status = retained.empty() ? "no_seeds" : "ok";
  for (const auto& tc : cases) report.pending_tts += tc.pending_tts ? 1 : 0;
  const auto categories = present_categories(seeds, &filter.retained);
  for (std::size_t m = 0; m < nm; ++m) {
    for (Category cat : categories) {
      for (std::size_t b = 0; b < nb; ++b) {
        ReportCell cell;
        cell.mr = mr_label(config.mrs[m]);
        cell.mr_id = std::string(mr_id(config.mrs[m]));
        cell.category = cat;
        cell.backend = backends[b]->name();
        for (const auto& tc : cases) {
          if (tc.mr_index != m || tc.category != cat || tc.pending_tts) continue;
          ++cell.generated;
          const Answer& a = tc.answers[b];
          if (!a.verdict) {
            ++cell.unanswered;
          } else if (a.verdict->category == Category::kNonToxic) {
            ++cell.misclassified;
          } else if (a.verdict->category != cat) {
            ++cell.drift;
          }
        }
        if (cell.generated > 0) report.cells.push_back(std::move(cell));
      }
    }
  }
  check_accounting(report);

  // Manifest.
  ordered_json manifest;
  manifest["version"] = kBuildIdentifier;
  manifest["language"] = linguistic::to_string(config.language);
  manifest["targets"] = config.targets;
  manifest["lexicon"] = config.lexicon
                            ? ordered_json(fs::absolute(*config.lexicon).string())
                            : ordered_json(nullptr);
  manifest["tts"] = config.tts ? ordered_json(config.tts->command)
                               : ordered_json(nullptr);
  manifest["backends"] = result.backend_names;
  ordered_json mrs = ordered_json::array();
  for (const auto& p : config.mrs) {
    ordered_json d = ordered_json::parse(to_json(p).dump());
    d["label"] = mr_label(p);
    d["id"] = mr_id(p);
    mrs.push_back(std::move(d));
  }
  manifest["mrs"] = std::move(mrs);
  ordered_json seed_list = ordered_json::array();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    ordered_json j;
    j["id"] = seeds[s].spec.id;
    j["audio"] = fs::absolute(seeds[s].spec.audio).string();
    j["transcript"] = seeds[s].spec.transcript
                          ? ordered_json(fs::absolute(*seeds[s].spec.transcript).string())
                          : ordered_json(nullptr);
    j["category"] = to_string(seeds[s].spec.category);
    j["digest"] = seeds[s].digest;
    j["retained"] = static_cast<bool>(filter.retained[s]);
    ordered_json answers = ordered_json::array();
    for (std::size_t b = 0; b < nb; ++b) {
      answers.push_back(answer_to_json(backends[b]->name(), filter.answers[s][b]));
    }
    j["verdicts"] = std::move(answers);
    seed_list.push_back(std::move(j));
  }
  manifest["seeds"] = std::move(seed_list);
  ordered_json case_list = ordered_json::array();
  for (const auto& tc : cases) {
    ordered_json j;
    j["seed_id"] = tc.seed_id;
    j["mr_index"] = tc.mr_index;
    j["mr"] = mr_label(config.mrs[tc.mr_index]);
    j["category"] = to_string(tc.category);
    j["artifact"] = tc.artifact;
    j["digest"] = tc.digest;
    j["text_artifact"] = tc.text_artifact;
    j["pending_tts"] = tc.pending_tts;
    ordered_json answers = ordered_json::array();
    for (std::size_t b = 0; b < tc.answers.size(); ++b) {
      answers.push_back(answer_to_json(backends[b]->name(), tc.answers[b]));
    }
    j["verdicts"] = std::move(answers);
    case_list.push_back(std::move(j));
  }
  manifest["cases"] = std::move(case_list);

  write_outputs(root, report, manifest);
  result.cases = std::move(cases);
  return result;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  std::vector<std::unique_ptr<ModerationBackend>> owned;
  std::vector<const ModerationBackend*> backends;
  for (const auto& spec : config.backends) {
    owned.push_back(make_backend(spec, config.base_dir));
    backends.push_back(owned.back().get());
  }
  return run_campaign(config, backends);
}

namespace {

json read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<Perturbation> manifest_mrs(const json& doc) {
  std::vector<Perturbation> mrs;
  for (json d : doc.at("mrs")) {
    d.erase("label");
    d.erase("id");
    mrs.push_back(perturbation_from_json(d));
  }
  return mrs;
}

}  // namespace

CampaignResult load_campaign(const fs::path& manifest_path) {
  const json doc = read_manifest(manifest_path);
  CampaignResult r;
  try {
    r.mrs = manifest_mrs(doc);
    r.backend_names = doc.at("backends").get<std::vector<std::string>>();
    r.output_dir = manifest_path.parent_path();
    for (const auto& j : doc.at("cases")) {
      TestCase tc;
      tc.seed_id = j.at("seed_id").get<std::string>();
      tc.mr_index = j.at("mr_index").get<std::size_t>();
      tc.category = parse_category(j.at("category").get<std::string>());
      tc.artifact = j.at("artifact").get<std::string>();
      tc.digest = j.at("digest").get<std::string>();
      tc.text_artifact = j.at("text_artifact").get<std::string>();
      tc.pending_tts = j.at("pending_tts").get<bool>();
      for (const auto& a : j.at("verdicts")) tc.answers.push_back(answer_from_json(a));
      if (tc.mr_index >= r.mrs.size()) throw FormatError("mr_index out of range");
      r.cases.push_back(std::move(tc));
    }
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  const fs::path report = r.output_dir / "report.json";
  if (fs::exists(report)) r.report = load_report(report);
  return r;
}

CampaignResult replay_campaign(const fs::path& manifest_path,
                               const fs::path& output_dir, int workers) {
  const json doc = read_manifest(manifest_path);
  const fs::path original = manifest_path.parent_path();
  CampaignConfig config;
  std::vector<std::map<std::string, Verdict>> recorded;
  std::vector<std::string> names;
  try {
    names = doc.at("backends").get<std::vector<std::string>>();
    recorded.resize(names.size());
    const auto record = [&](const json& verdicts, const std::string& digest) {
      for (std::size_t b = 0; b < names.size(); ++b) {
        const Answer a = answer_from_json(verdicts.at(b));
        if (a.verdict) recorded[b].emplace(digest, *a.verdict);
      }
    };
    config.language = linguistic::parse_language(doc.at("language").get<std::string>());
    for (const auto& t : doc.at("targets")) config.targets.insert(t.get<std::string>());
    if (!doc.at("lexicon").is_null()) config.lexicon = doc["lexicon"].get<std::string>();
    if (!doc.at("tts").is_null()) config.tts = TtsConfig{doc["tts"].get<std::string>()};
    config.mrs = manifest_mrs(doc);
    for (const auto& s : doc.at("seeds")) {
      SeedSpec spec;
      spec.id = s.at("id").get<std::string>();
      spec.audio = s.at("audio").get<std::string>();
      if (!s.at("transcript").is_null()) spec.transcript = s["transcript"].get<std::string>();
      spec.category = parse_category(s.at("category").get<std::string>());
      config.seeds.push_back(std::move(spec));
      record(s.at("verdicts"), s.at("digest").get<std::string>());
    }
    for (const auto& c : doc.at("cases")) {
      if (c.at("pending_tts").get<bool>()) continue;
      record(c.at("verdicts"), c.at("digest").get<std::string>());
      const auto text = c.at("text_artifact").get<std::string>();
      if (!text.empty()) {
        config.synthesized.emplace(text, original / c.at("artifact").get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  config.workers = workers;
  config.output_dir = output_dir;

  std::vector<FixtureBackend> fixtures;
  fixtures.reserve(names.size());
  for (std::size_t b = 0; b < names.size(); ++b) {
    fixtures.emplace_back(names[b], std::move(recorded[b]));
  }
  std::vector<const ModerationBackend*> backends;
  for (const auto& f : fixtures) backends.push_back(&f);
  return run_campaign(config, backends);
}

DatasetManifest export_retraining_set(const CampaignResult& campaign,
                                      double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ParameterError("split fraction must lie in (0, 1)");
  }
  DatasetManifest out;
  out.fraction = fraction;
  out.seed = seed;
  DeterministicRng rng(seed);
  for (std::size_t m = 0; m < campaign.mrs.size(); ++m) {
    std::map<Category, std::vector<const TestCase*>> groups;
    for (const auto& tc : campaign.cases) {
      if (tc.mr_index == m && !tc.artifact.empty()) {
        groups[tc.category].push_back(&tc);
      }
    }
    if (groups.empty()) continue;
    std::size_t smallest = SIZE_MAX;
    for (const auto& [cat, members] : groups) {
      smallest = std::min(smallest, members.size());
    }
    const auto test_quota = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(smallest)));
    const std::size_t train_quota = std::min(test_quota, smallest - test_quota);
    const json descriptor = to_json(campaign.mrs[m]);
    for (auto& [cat, members] : groups) {
      for (std::size_t i = members.size(); i > 1; --i) {
        std::swap(members[i - 1], members[rng.below(i)]);
      }
      for (std::size_t i = 0; i < members.size(); ++i) {
        const TestCase& tc = *members[i];
        DatasetEntry e;
        e.artifact = fs::absolute(campaign.output_dir / tc.artifact).string();
        e.label = tc.category;
        e.mr = descriptor;
        e.seed_id = tc.seed_id;
        e.split = i < test_quota                 ? "test"
                  : i < test_quota + train_quota ? "train"
                                                 : "unused";
        out.entries.push_back(std::move(e));
      }
    }
  }
  return out;
}

ordered_json to_json(const DatasetManifest& manifest) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"artifact", e.artifact},
                       {"label", to_string(e.label)},
                       {"mr", ordered_json::parse(e.mr.dump())},
                       {"seed_id", e.seed_id},
                       {"split", e.split}});
  }
  ordered_json out;
  out["version"] = kBuildIdentifier;
  out["fraction"] = manifest.fraction;
  out["seed"] = manifest.seed;
  out["entries"] = std::move(entries);
  return out;
}

}  // namespace audiomt
