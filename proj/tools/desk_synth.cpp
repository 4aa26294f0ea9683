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

#include "desk_synth.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audiomt/errors.hpp"
#include "audiomt/harness.hpp"
#include "audiomt/mr_basic.hpp"
#include "audiomt/rng.hpp"
#include "audiomt/spotter.hpp"
#include "audiomt/wav.hpp"

namespace audiomt::desk {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Syllable {
  double duration_s;
  double f0_start, f0_end;
  double f1_start, f1_end;
  double f2_start, f2_end;
  double f3;
  bool burst;
};

std::vector<Syllable> recipe(std::string_view word) {
  DeterministicRng rng(fnv1a(word));
  const auto between = [&](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
  };
  // Short function words get one syllable, longer words up to three.
  const std::size_t count =
      word.size() <= 3 ? 1 : (word.size() <= 5 ? 2 : 3);
  std::vector<Syllable> out;
  for (std::size_t i = 0; i < count; ++i) {
    Syllable s;
    s.duration_s = between(0.11, 0.19);
    s.f0_start = between(105.0, 150.0);
    s.f0_end = s.f0_start * between(0.85, 1.1);
    s.f1_start = between(300.0, 850.0);
    s.f1_end = between(300.0, 850.0);
    s.f2_start = between(900.0, 2400.0);
    s.f2_end = between(900.0, 2400.0);
    s.f3 = between(2400.0, 3300.0);
    s.burst = rng.uniform() < 0.6;
    out.push_back(s);
  }
  return out;
}

double resonance(double f, double centre) {
  const double x = (f - centre) / 160.0;
  return 1.0 / (1.0 + x * x);
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

}  // namespace

AudioBuffer speak_word(std::string_view word, const Voice& voice) {
  const double rate = kSampleRate;
  DeterministicRng noise(fnv1a(word) ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> out;
  for (const Syllable& s : recipe(word)) {
    const auto n = static_cast<std::size_t>(s.duration_s / voice.tempo * rate);
    const std::size_t burst =
        s.burst ? static_cast<std::size_t>(0.03 / voice.tempo * rate) : 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < burst; ++i) {
      const double w = noise.normal();
      out.push_back(0.25 * (w - prev));  // first difference: hiss, not rumble
      prev = w;
    }
    const std::size_t ramp = static_cast<std::size_t>(0.015 * rate);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n);
      const double f0 = voice.pitch * (s.f0_start + (s.f0_end - s.f0_start) * u);
      const double f1 = voice.formant * (s.f1_start + (s.f1_end - s.f1_start) * u);
      const double f2 = voice.formant * (s.f2_start + (s.f2_end - s.f2_start) * u);
      const double f3 = voice.formant * s.f3;
      phase += 2.0 * std::numbers::pi * f0 / rate;
      double v = 0.0;
      for (int k = 1; k * f0 < 4000.0; ++k) {
        const double f = k * f0;
        v += (resonance(f, f1) + 0.5 * resonance(f, f2) + 0.25 * resonance(f, f3)) *
             std::sin(k * phase);
      }
      double env = 1.0;
      if (i < ramp) env = static_cast<double>(i) / ramp;
      if (n - i < ramp) env = static_cast<double>(n - i) / ramp;
      out.push_back(v * env);
    }
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= 0.5 / peak;
  }
  return AudioBuffer::mono(std::move(out), kSampleRate);
}

Utterance speak(const std::vector<std::string>& tokens, const Voice& voice,
                double pause_s, double edge_s) {
  const double rate = kSampleRate;
  const std::string marker = "...";
  std::vector<double> samples(static_cast<std::size_t>(edge_s * rate), 0.0);
  Utterance u;
  u.transcript.alignment.emplace();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string word = tokens[i];
    bool stop = false;
    if (word.size() > marker.size() &&
        word.compare(word.size() - marker.size(), marker.size(), marker) == 0) {
      word.resize(word.size() - marker.size());
      stop = true;
    }
    const AudioBuffer w = speak_word(word, voice);
    const double start = samples.size() / rate;
    samples.insert(samples.end(), w.channel(0).begin(), w.channel(0).end());
    u.transcript.tokens.push_back(word);
    u.transcript.alignment->push_back({start, samples.size() / rate});
    const double gap = stop ? 0.25 : (i + 1 < tokens.size() ? pause_s : 0.0);
    samples.resize(samples.size() + static_cast<std::size_t>(gap * rate), 0.0);
  }
  samples.resize(samples.size() + static_cast<std::size_t>(edge_s * rate), 0.0);
  u.audio = AudioBuffer::mono(std::move(samples), kSampleRate);
  return u;
}

const std::vector<Keyword>& keywords() {
  static const std::vector<Keyword> list = {
      {Category::kInsult, "fuck"},   {Category::kInsult, "bitch"},
      {Category::kInsult, "idiot"},  {Category::kPorn, "nude"},
      {Category::kPorn, "porn"},     {Category::kSpam, "casino"},
      {Category::kSpam, "lottery"},
  };
  return list;
}

void generate_corpus(const fs::path& dir) {
  fs::create_directories(dir / "templates");
  fs::create_directories(dir / "seeds");
  fs::create_directories(dir / "calibration");

  // Templates carry the same noise floor as the recordings: digital silence
  // would put log-mel floors into the features that no real clip has.
  for (std::size_t i = 0; i < keywords().size(); ++i) {
    const auto& k = keywords()[i];
    write_wav(basic::inject_noise(speak({k.word}, Voice{}, 0.0, 0.02).audio, 40.0,
                                  900 + i),
              dir / "templates" /
                  (std::string(to_string(k.tag)) + "__" + k.word + ".wav"));
  }

  // Each clip gets its own speaker and a faint noise floor.
  const auto voice_for = [](std::uint64_t seed) {
    DeterministicRng rng(seed);
    Voice v;
    v.pitch = 0.96 + 0.08 * rng.uniform();
    v.formant = 0.98 + 0.04 * rng.uniform();
    v.tempo = 0.95 + 0.10 * rng.uniform();
    return v;
  };
  const auto record = [&](const std::string& text, std::uint64_t seed) {
    Utterance u = speak(split_tokens(text), voice_for(seed));
    u.audio = basic::inject_noise(u.audio, 40.0, seed);
    return u;
  };

  struct SeedLine {
    const char* id;
    Category category;
    const char* text;
  };
  // s12 is declared toxic but carries no keyword, so the filter drops it.
  const std::vector<SeedLine> seeds = {
      {"s01", Category::kInsult, "fuck you"},
      {"s02", Category::kInsult, "son of a bitch"},
      {"s03", Category::kInsult, "you are an idiot"},
      {"s04", Category::kInsult, "shut up you idiot"},
      {"s05", Category::kInsult, "what the fuck is this"},
      {"s06", Category::kPorn, "watch nude video now"},
      {"s07", Category::kPorn, "free porn here"},
      {"s08", Category::kPorn, "hot nude call"},
      {"s09", Category::kSpam, "win big at the casino"},
      {"s10", Category::kSpam, "call now for the lottery"},
      {"s11", Category::kSpam, "play casino today"},
      {"s12", Category::kInsult, "you are so mean"},
  };
  ordered_json seed_json = ordered_json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string id = seeds[i].id;
    const Utterance u = record(seeds[i].text, 100 + i);
    write_wav(u.audio, dir / "seeds" / (id + ".wav"));
    linguistic::write_transcript(u.transcript, dir / "seeds" / (id + ".tsv"));
    seed_json.push_back({{"id", id},
                         {"audio", "seeds/" + id + ".wav"},
                         {"transcript", "seeds/" + id + ".tsv"},
                         {"category", to_string(seeds[i].category)}});
  }

  const std::vector<std::pair<Category, const char*>> calibration = {
      {Category::kInsult, "shut the fuck up"},
      {Category::kInsult, "stupid bitch"},
      {Category::kInsult, "such an idiot"},
      {Category::kPorn, "nude photos"},
      {Category::kPorn, "watch porn"},
      {Category::kSpam, "online casino bonus"},
      {Category::kSpam, "claim your lottery prize"},
      {Category::kInsult, "get lost idiot"},
      {Category::kNonToxic, "good morning everyone"},
      {Category::kNonToxic, "see you at lunch"},
      {Category::kNonToxic, "the weather is nice"},
      {Category::kNonToxic, "call me later"},
      {Category::kNonToxic, "thanks for the video"},
      {Category::kNonToxic, "we won the game"},
      {Category::kNonToxic, "open the window please"},
      {Category::kNonToxic, "a new casual lot"},
  };
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s__c%02zu.wav",
                  std::string(to_string(calibration[i].first)).c_str(), i + 1);
    write_wav(record(calibration[i].second, 500 + i).audio,
              dir / "calibration" / name);
  }

  write_text(dir / "lexicon.tsv",
             "# word<TAB>candidates, best first; cand:score for explicit ranks\n"
             "fuck\tfolk,fork\n"
             "bitch\tbeach\n"
             "idiot\tidiom\n"
             "nude\tnewd,node\n"
             "porn\tpawn:0.9,born:0.9\n"
             "casino\tcassino\n"
             "lottery\tlotto\n");

  const spotter::SpotterWindow window{0.0, 0.02};
  const auto templates = spotter::load_templates(dir / "templates");
  const auto clips = spotter::load_labeled_clips(dir / "calibration");
  const auto cal = spotter::calibrate_threshold(templates, clips, window);

  const auto mrs = ordered_json::parse(R"([
    {"name": "time-stretch", "factor": 0.8},
    {"name": "time-stretch", "factor": 1.5},
    {"name": "time-shift", "seconds": 0.3},
    {"name": "pan", "position": -1.0},
    {"name": "surround", "rotation_hz": 0.5},
    {"name": "pitch-shift", "semitones": 4.0},
    {"name": "pitch-shift", "semitones": -4.0},
    {"name": "noise", "snr_db": 10.0, "seed": 7},
    {"name": "repeat", "start_s": 0.1, "end_s": 0.4, "count": 2},
    {"name": "gain", "db": 0.0},
    {"name": "gain", "db": -12.0},
    {"name": "compress", "threshold_db": -20.0, "ratio": 4.0},
    {"name": "ring-mod", "carrier_hz": 30.0},
    {"name": "bass-boost", "cutoff_hz": 200.0, "gain_db": 12.0},
    {"name": "tremolo", "rate_hz": 4.0, "depth": 0.8},
    {"name": "distort", "clip_threshold": 0.3, "drive": 1.0},
    {"name": "echo", "delay_s": 0.2, "decay": 0.5, "taps": 2},
    {"name": "reverb", "intensity": 0.3, "duration_s": 0.8, "seed": 11},
    {"name": "homophone", "seed": 1},
    {"name": "discontinuity-text", "marker": "...", "repeats": 3},
    {"name": "discontinuity-audio", "gap_s": 0.3, "repeats": 3}
  ])");
  ordered_json targets = ordered_json::array();
  for (const auto& k : keywords()) targets.push_back(k.word);

  ordered_json spotter_cfg;
  spotter_cfg["description"] =
      "Desk campaign against the MFCC+DTW keyword spotter.";
  spotter_cfg["seeds"] = seed_json;
  spotter_cfg["mrs"] = mrs;
  spotter_cfg["backends"] = ordered_json::array(
      {{{"name", "spotter"},
        {"kind", "keyword_spotter"},
        {"templates", "templates"},
        {"threshold", cal.threshold},
        {"window_s", window.window_s},
        {"hop_s", window.hop_s}}});
  spotter_cfg["workers"] = 4;
  spotter_cfg["output_dir"] = "out/spotter";
  spotter_cfg["language"] = "en";
  spotter_cfg["lexicon"] = "lexicon.tsv";
  spotter_cfg["targets"] = targets;
  write_text(dir / "campaign_spotter.json", spotter_cfg.dump(2) + "\n");

  // Record the spotter's answers once so the fixture demo needs no DSP.
  const fs::path scratch = fs::temp_directory_path() / "audiomt-desk-scratch";
  fs::remove_all(scratch);
  CampaignConfig config = load_campaign_config(dir / "campaign_spotter.json");
  config.output_dir = scratch;
  run_campaign(config);
  std::map<std::string, Verdict> verdicts;
  {
    std::ifstream in(scratch / "manifest.json");
    const auto doc = nlohmann::json::parse(in);
    const auto take = [&](const nlohmann::json& entry) {
      const auto& v = entry.at("verdicts").at(0);
      if (v.at("category").is_null()) return;
      Verdict verdict;
      verdict.category = parse_category(v["category"].get<std::string>());
      if (!v["confidence"].is_null()) verdict.confidence = v["confidence"].get<double>();
      verdicts.emplace(entry.at("digest").get<std::string>(), verdict);
    };
    for (const auto& s : doc.at("seeds")) take(s);
    for (const auto& c : doc.at("cases")) {
      if (!c.at("pending_tts").get<bool>()) take(c);
    }
  }
  FixtureBackend("spotter", verdicts).save(dir / "fixture.json");
  fs::remove_all(scratch);

  ordered_json fixture_cfg = spotter_cfg;
  fixture_cfg["description"] =
      "Replays recorded spotter verdicts; no signal processing on the backend side.";
  fixture_cfg["backends"] = ordered_json::array(
      {{{"name", "spotter"}, {"kind", "fixture"}, {"path", "fixture.json"}}});
  fixture_cfg["output_dir"] = "out/fixture";
  write_text(dir / "campaign_fixture.json", fixture_cfg.dump(2) + "\n");
}

}  // namespace audiomt::desk
