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

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"
#include "audiomt/harness.hpp"
#include "audiomt/linguistic.hpp"
#include "audiomt/perturbation.hpp"
#include "audiomt/report.hpp"
#include "audiomt/spotter.hpp"
#include "audiomt/version.hpp"
#include "audiomt/wav.hpp"

namespace audiomt::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// Short flag -> descriptor key. A flag the chosen relation does not take is
// rejected by the descriptor parser.
const std::vector<std::pair<std::string, std::string>> kParamFlags = {
    {"factor", "factor"},        {"seconds", "seconds"},
    {"position", "position"},    {"rotation", "rotation_hz"},
    {"semitones", "semitones"},  {"snr", "snr_db"},
    {"seed", "seed"},            {"start", "start_s"},
    {"end", "end_s"},            {"count", "count"},
    {"db", "db"},                {"threshold", "threshold_db"},
    {"ratio", "ratio"},          {"carrier", "carrier_hz"},
    {"cutoff", "cutoff_hz"},     {"gain", "gain_db"},
    {"rate", "rate_hz"},         {"depth", "depth"},
    {"clip", "clip_threshold"},  {"drive", "drive"},
    {"delay", "delay_s"},        {"decay", "decay"},
    {"taps", "taps"},            {"intensity", "intensity"},
    {"duration", "duration_s"},  {"marker", "marker"},
    {"repeats", "repeats"},      {"gap", "gap_s"},
};

class UsageError : public Error {
 public:
  using Error::Error;
};

linguistic::WordSet split_words(const std::string& csv,
                                linguistic::Language language) {
  linguistic::WordSet out;
  std::stringstream in(csv);
  std::string word;
  while (std::getline(in, word, ',')) {
    if (!word.empty()) out.insert(linguistic::normalize(word, language));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw IoError("cannot write " + path.string());
  }
}

struct PerturbArgs {
  std::string mr;
  std::string params;
  std::map<std::string, std::string> values;
  std::string input, output;
  std::string transcript, targets, lexicon, language = "en";
};

int do_perturb(const PerturbArgs& a, std::ostream& out, std::ostream& err) {
  json descriptor = json::object();
  if (!a.params.empty()) {
    try {
      descriptor = json::parse(a.params);
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("--params: ") + e.what());
    }
    if (!descriptor.is_object()) throw UsageError("--params must be an object");
  }
  descriptor["name"] = a.mr;
  for (const auto& [key, text] : a.values) {
    if (text.empty()) continue;
    if (key == "marker") {
      descriptor[key] = text;
      continue;
    }
    try {
      descriptor[key] = json::parse(text);
    } catch (const json::parse_error&) {
      throw UsageError("not a number for " + key + ": " + text);
    }
  }
  const Perturbation p = perturbation_from_json(descriptor);

  const auto language = linguistic::parse_language(a.language);
  const AudioBuffer input = read_wav(a.input);
  std::optional<linguistic::Transcript> transcript;
  if (!a.transcript.empty()) {
    transcript = linguistic::read_transcript(a.transcript, language);
  }
  if (needs_transcript(p) && !transcript) {
    throw UsageError(std::string(mr_name(p)) + " needs --transcript");
  }
  const auto lexicon = a.lexicon.empty()
                           ? linguistic::HomophoneLexicon::english_default()
                           : linguistic::HomophoneLexicon::load(a.lexicon, language);
  const LinguisticContext context{&lexicon, split_words(a.targets, language)};
  if (needs_transcript(p) && context.targets.empty()) {
    throw UsageError(std::string(mr_name(p)) + " needs --targets");
  }

  const auto result = apply_perturbation(p, input, transcript ? &*transcript : nullptr,
                                         context);
  ordered_json echo;
  echo["mr"] = ordered_json::parse(to_json(p).dump());
  echo["label"] = mr_label(p);
  echo["id"] = mr_id(p);
  echo["input"] = a.input;
  echo["output"] = a.output;
  if (result.audio) {
    write_wav(*result.audio, a.output);
    echo["digest"] = audio_digest(*result.audio);
  } else {
    write_file(a.output, linguistic::render(*result.text) + "\n");
    err << "wrote text for external synthesis: " << a.output << '\n';
  }
  out << echo.dump() << '\n';
  return kOk;
}

struct CampaignArgs {
  std::string config;
  std::string replay;
  std::string output;
  int workers = 0;
};

int do_campaign(const CampaignArgs& a, std::ostream& out, std::ostream& err) {
  CampaignResult result;
  if (!a.replay.empty()) {
    if (a.output.empty()) throw UsageError("--replay needs --output");
    result = replay_campaign(a.replay, a.output, a.workers > 0 ? a.workers : 4);
  } else {
    if (a.config.empty()) throw UsageError("campaign needs a config path");
    CampaignConfig config = load_campaign_config(a.config);
    if (a.workers > 0) config.workers = a.workers;
    if (!a.output.empty()) config.output_dir = a.output;
    result = run_campaign(config);
  }
  const auto& r = result.report;
  out << report_json_text(r);
  err << report_table(r);
  err << "seeds: " << r.seed_filter.retained << " of " << r.seed_filter.originals
      << " retained";
  if (r.pending_tts > 0) err << ", " << r.pending_tts << " text cases await TTS";
  err << "\nreport: " << (result.output_dir / "report.json").string() << '\n';
  if (r.status == "no_seeds") {
    err << "no seeds survived filtering\n";
    return kNoSeeds;
  }
  return kOk;
}

struct CalibrateArgs {
  std::string templates, clips;
  double window_s = 0.0;
  double hop_s = 0.01;
};

int do_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  const auto templates = spotter::load_templates(a.templates);
  const auto clips = spotter::load_labeled_clips(a.clips);
  const spotter::SpotterWindow window{a.window_s, a.hop_s};
  const auto cal = spotter::calibrate_threshold(templates, clips, window);
  ordered_json j;
  j["threshold"] = cal.threshold;
  j["accuracy"] = cal.accuracy;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < clips.size(); ++i) {
    rows.push_back({{"id", clips[i].id},
                    {"label", to_string(clips[i].label)},
                    {"distance", cal.distances[i]}});
  }
  j["clips"] = std::move(rows);
  out << j.dump(2) << '\n';
  err << "threshold " << cal.threshold << " accuracy " << cal.accuracy << " over "
      << clips.size() << " clips\n";
  return kOk;
}

struct KeywordArgs {
  std::string corpus, stopwords, language = "en";
  int k = 10;
};

int do_keywords(const KeywordArgs& a, std::ostream& out, std::ostream&) {
  const auto language = linguistic::parse_language(a.language);
  const auto corpus = linguistic::read_corpus(a.corpus, language);
  if (corpus.empty()) throw UsageError("corpus " + a.corpus + " has no documents");
  if (a.k < 1) throw UsageError("-k must be >= 1");
  const auto stop = a.stopwords.empty()
                        ? linguistic::WordSet{}
                        : linguistic::read_stopwords(a.stopwords, language);
  for (const auto& s : linguistic::select_keywords(corpus, stop, a.k)) {
    out << s.token << '\t' << json(s.tf_idf).dump() << '\n';
  }
  return kOk;
}

struct ReportArgs {
  std::string report;
  std::optional<double> split;
  std::uint64_t seed = 0;
  std::string out;
};

int do_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const CampaignReport r = load_report(a.report);
  check_accounting(r);
  err << report_table(r);
  if (!a.split) {
    out << report_csv(r);
    return kOk;
  }
  const fs::path manifest = fs::path(a.report).parent_path() / r.manifest;
  const auto dataset =
      export_retraining_set(load_campaign(manifest), *a.split, a.seed);
  const std::string text = to_json(dataset).dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  std::size_t test = 0, train = 0;
  for (const auto& e : dataset.entries) {
    test += e.split == "test";
    train += e.split == "train";
  }
  err << "export: " << test << " test, " << train << " train of "
      << dataset.entries.size() << " artifacts\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Metamorphic testing for audio content moderation", "audiomt"};
  app.set_version_flag("--version", kBuildIdentifier);
  app.require_subcommand(1, 1);

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Apply one relation to a WAV file");
  perturb->add_option("--mr", pa.mr, "Relation name")->required();
  perturb->add_option("--params", pa.params, "Descriptor parameters as JSON");
  for (const auto& [flag, key] : kParamFlags) {
    perturb->add_option("--" + flag, pa.values[key], key);
  }
  perturb->add_option("--transcript", pa.transcript, "Token-per-line transcript");
  perturb->add_option("--targets", pa.targets, "Comma-separated target words");
  perturb->add_option("--lexicon", pa.lexicon, "Homophone lexicon (TSV)");
  perturb->add_option("--language", pa.language, "en or zh");
  perturb->add_option("input", pa.input, "Input WAV")->required();
  perturb->add_option("output", pa.output, "Output WAV (or text)")->required();

  CampaignArgs ca;
  auto* campaign = app.add_subcommand("campaign", "Run or replay a test campaign");
  campaign->add_option("config", ca.config, "Campaign config JSON");
  campaign->add_option("--replay", ca.replay, "Replay a recorded manifest.json");
  campaign->add_option("--output", ca.output, "Output directory override");
  campaign->add_option("--workers", ca.workers, "Worker threads (default 4)")
      ->check(CLI::PositiveNumber);

  CalibrateArgs cb;
  auto* calibrate =
      app.add_subcommand("calibrate", "Fit the keyword spotter's threshold");
  calibrate->add_option("--templates", cb.templates, "Template directory")->required();
  calibrate->add_option("--clips", cb.clips, "Labeled clip directory")->required();
  calibrate->add_option("--window-s", cb.window_s, "Window length; 0 = template length");
  calibrate->add_option("--hop-s", cb.hop_s, "Window hop")->check(CLI::PositiveNumber);

  KeywordArgs ka;
  auto* keywords = app.add_subcommand("keywords", "Rank candidate target words");
  keywords->add_option("corpus", ka.corpus, "One document per line")->required();
  keywords->add_option("--stopwords", ka.stopwords, "One stopword per line");
  keywords->add_option("-k", ka.k, "How many keywords");
  keywords->add_option("--language", ka.language, "en or zh");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Render a report or export data");
  report->add_option("report", ra.report, "report.json")->required();
  report->add_option("--export-split", ra.split, "Test fraction in (0, 1)");
  report->add_option("--seed", ra.seed, "Shuffle seed for the export");
  report->add_option("--out", ra.out, "Write the export here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*perturb) return do_perturb(pa, out, err);
    if (*campaign) return do_campaign(ca, out, err);
    if (*calibrate) return do_calibrate(cb, out, err);
    if (*keywords) return do_keywords(ka, out, err);
    return do_report(ra, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace audiomt::cli
