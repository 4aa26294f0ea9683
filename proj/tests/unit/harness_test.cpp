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

#include <gtest/gtest.h>

#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"
#include "audiomt/harness.hpp"
#include "audiomt/mr_basic.hpp"
#include "audiomt/wav.hpp"
#include "signals.hpp"

namespace audiomt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kRate = 16000;
constexpr std::size_t kBaseFrames = 1600;
constexpr double kSeedAmplitude = 0.2;

// Seed i is a quiet tone of kBaseFrames + 10 i frames, so a backend can tell
// which seed a case came from by its length, and whether it was perturbed
// (by gain) from its peak.
std::size_t seed_index(const AudioBuffer& a) {
  return (a.frames() - kBaseFrames) / 10;
}
bool is_loud(const AudioBuffer& a) { return peak(a) > 1.5 * kSeedAmplitude; }

class ScriptedBackend final : public ModerationBackend {
 public:
  using Script = std::function<Category(const AudioBuffer&)>;
  ScriptedBackend(std::string name, Script script)
      : name_(std::move(name)), script_(std::move(script)) {}
  const std::string& name() const noexcept override { return name_; }
  Verdict moderate(const AudioBuffer& audio,
                   const linguistic::Transcript*) const override {
    ++calls;
    return Verdict{script_(audio), std::nullopt, {}};
  }
  mutable std::atomic<int> calls{0};

 private:
  std::string name_;
  Script script_;
};

std::vector<SeedSpec> write_seeds(const fs::path& dir,
                                  const std::vector<Category>& categories,
                                  std::size_t frame_step = 10) {
  std::vector<SeedSpec> out;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const auto n = kBaseFrames + frame_step * i;
    auto tone = testing::sine(300.0 + 7.0 * static_cast<double>(i),
                              static_cast<double>(n) / kRate, kRate,
                              kSeedAmplitude);
    const fs::path path = dir / ("seed" + std::to_string(i) + ".wav");
    write_wav(tone, path);
    out.push_back({"s" + std::to_string(i), path, std::nullopt, categories[i]});
  }
  return out;
}

CampaignConfig config_for(std::vector<SeedSpec> seeds,
                          std::vector<Perturbation> mrs, const fs::path& out) {
  CampaignConfig c;
  c.seeds = std::move(seeds);
  c.mrs = std::move(mrs);
  c.output_dir = out;
  c.workers = 3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Perturbation kLouder = basic::Gain{6.0206};

TEST(FilterSeeds, ScriptedMatrixFollowsTheExclusionRule) {
  testing::TempDir dir;
  using C = Category;
  const auto specs = write_seeds(
      dir.path(), {C::kInsult, C::kSpam, C::kPorn, C::kInsult, C::kSpam});
  std::vector<Seed> seeds;
  for (const auto& s : specs) seeds.push_back(load_seed(s, {}));

  // Rows: seed; columns: backend a, backend b. "x" is an outage.
  const std::vector<std::pair<const char*, const char*>> matrix = {
      {"insult", "non_toxic"},     // retained: a agrees
      {"non_toxic", "non_toxic"},  // excluded: nobody flags it
      {"insult", "spam"},          // excluded: flagged, but never as porn
      {"x", "insult"},             // retained: b agrees
      {"x", "x"},                  // excluded: no answer at all
  };
  auto column = [&](int b) {
    return [&, b](const AudioBuffer& a) {
      const char* cell = b == 0 ? matrix[seed_index(a)].first
                                : matrix[seed_index(a)].second;
      if (std::string(cell) == "x") throw BackendUnavailableError("down");
      return parse_category(cell);
    };
  };
  ScriptedBackend a("a", column(0)), b("b", column(1));
  const std::vector<const ModerationBackend*> backends{&a, &b};
  const auto r = filter_seeds(seeds, backends, 2);

  EXPECT_EQ(r.retained, (std::vector<bool>{true, false, false, true, false}));
  EXPECT_EQ(r.report.originals, 5u);
  EXPECT_EQ(r.report.retained, 2u);
  EXPECT_EQ(r.report.excluded, (std::vector<std::string>{"s1", "s2", "s4"}));
  EXPECT_EQ(r.answers[3][0].error, "down");

  // Categories in enum order (insult, porn, spam) for each backend.
  ASSERT_EQ(r.report.per_backend.size(), 6u);
  const auto& a_insult = r.report.per_backend[0];
  EXPECT_EQ(a_insult.backend, "a");
  EXPECT_EQ(a_insult.category, C::kInsult);
  EXPECT_EQ(a_insult.originals, 2u);
  EXPECT_EQ(a_insult.flagged, 1u);
  EXPECT_EQ(a_insult.unanswered, 1u);
  const auto& b_spam = r.report.per_backend[5];
  EXPECT_EQ(b_spam.backend, "b");
  EXPECT_EQ(b_spam.category, C::kSpam);
  EXPECT_EQ(b_spam.flagged, 0u);
  EXPECT_EQ(b_spam.unanswered, 1u);
}

TEST(FilterSeeds, TotalOutageAbortsTheCampaign) {
  testing::TempDir dir;
  const auto specs = write_seeds(dir.path(), {Category::kInsult});
  ScriptedBackend down("down", [](const AudioBuffer&) -> Category {
    throw BackendUnavailableError("offline");
  });
  const std::vector<const ModerationBackend*> backends{&down};
  EXPECT_THROW(run_campaign(config_for(specs, {kLouder}, dir / "out"), backends),
               BackendUnavailableError);
}

TEST(Campaign, FiveOfTwentyMisclassifiedIsTwentyFivePercent) {
  testing::TempDir dir;
  const auto specs =
      write_seeds(dir.path(), std::vector<Category>(20, Category::kSpam));
  ScriptedBackend mock("mock", [](const AudioBuffer& a) {
    return is_loud(a) && seed_index(a) < 5 ? Category::kNonToxic
                                           : Category::kSpam;
  });
  const std::vector<const ModerationBackend*> backends{&mock};
  const auto r = run_campaign(config_for(specs, {kLouder}, dir / "out"), backends);
  ASSERT_EQ(r.report.cells.size(), 1u);
  const auto& c = r.report.cells[0];
  EXPECT_EQ(c.generated, 20u);
  EXPECT_EQ(c.misclassified, 5u);
  EXPECT_EQ(*c.efr(), 25.0);
  EXPECT_EQ(mock.calls.load(), 40);
}

TEST(Campaign, BackendEchoingTheSeedVerdictFindsNothing) {
  testing::TempDir dir;
  const auto specs =
      write_seeds(dir.path(), std::vector<Category>(3, Category::kInsult));
  ScriptedBackend echo("echo", [](const AudioBuffer&) { return Category::kInsult; });
  const std::vector<Perturbation> mrs = {
      basic::Gain{0.0},    kLouder,           compound::Echo{},
      compound::Tremolo{}, compound::RingMod{}, basic::TimeShift{0.01}};
  const std::vector<const ModerationBackend*> backends{&echo};
  const auto r = run_campaign(config_for(specs, mrs, dir / "out"), backends);
  ASSERT_EQ(r.report.cells.size(), mrs.size());
  for (const auto& c : r.report.cells) {
    EXPECT_EQ(c.generated, 3u);
    EXPECT_EQ(*c.efr(), 0.0) << c.mr;
  }
}

TEST(Campaign, UnansweredAndDriftAreKeptOutOfTheEfr) {
  testing::TempDir dir;
  const auto specs =
      write_seeds(dir.path(), std::vector<Category>(6, Category::kInsult));
  ScriptedBackend mock("mock", [](const AudioBuffer& a) {
    if (!is_loud(a)) return Category::kInsult;
    switch (seed_index(a)) {
      case 0: throw MappingError("unknown label");
      case 1: throw MissingFixtureError("no entry");
      case 2: return Category::kPorn;
      case 3: return Category::kNonToxic;
      default: return Category::kInsult;
    }
  });
  const std::vector<const ModerationBackend*> backends{&mock};
  const auto r = run_campaign(config_for(specs, {kLouder}, dir / "out"), backends);
  const auto& c = r.report.cells.at(0);
  EXPECT_EQ(c.generated, 6u);
  EXPECT_EQ(c.unanswered, 2u);
  EXPECT_EQ(c.misclassified, 1u);
  EXPECT_EQ(c.drift, 1u);
  EXPECT_EQ(c.correct(), 3u);
  EXPECT_EQ(*c.efr(), 25.0);
}

TEST(Campaign, NoSeedsStillWritesAnEmptyReport) {
  testing::TempDir dir;
  const auto specs = write_seeds(dir.path(), {Category::kPorn});
  ScriptedBackend mock("mock", [](const AudioBuffer&) { return Category::kNonToxic; });
  const std::vector<const ModerationBackend*> backends{&mock};
  const auto r = run_campaign(config_for(specs, {kLouder}, dir / "out"), backends);
  EXPECT_EQ(r.report.status, "no_seeds");
  EXPECT_TRUE(r.report.cells.empty());
  EXPECT_EQ(r.report.seed_filter.excluded, (std::vector<std::string>{"s0"}));
  EXPECT_EQ(load_report(dir / "out" / "report.json").status, "no_seeds");
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Campaign, ArtifactsAreContentAddressedAndReadable) {
  testing::TempDir dir;
  const auto specs = write_seeds(dir.path(), {Category::kInsult, Category::kSpam});
  ScriptedBackend mock("mock", [](const AudioBuffer&) { return Category::kInsult; });
  const std::vector<const ModerationBackend*> backends{&mock};
  const auto r = run_campaign(
      config_for(specs, {kLouder, compound::Echo{}}, dir / "out"), backends);
  // The spam seed is excluded; one seed times two relations remain.
  ASSERT_EQ(r.cases.size(), 2u);
  for (const auto& tc : r.cases) {
    EXPECT_EQ(tc.artifact, "artifacts/" + tc.digest + ".wav");
    const auto back = read_wav(dir / "out" / tc.artifact);
    EXPECT_EQ(audio_digest(back), tc.digest);
  }
}

TEST(Replay, FixtureReplayReproducesTheReportByteForByte) {
  testing::TempDir dir;
  const auto specs =
      write_seeds(dir.path(), std::vector<Category>(13, Category::kSpam));
  // Ring modulation wipes out the provider's detector: 13 of 13 missed.
  std::set<std::string> seed_digests;
  for (const auto& s : specs) seed_digests.insert(load_seed(s, {}).digest);
  ScriptedBackend provider("provider", [&](const AudioBuffer& a) {
    return seed_digests.count(audio_digest(a)) ? Category::kSpam
                                               : Category::kNonToxic;
  });
  const std::vector<const ModerationBackend*> backends{&provider};
  const auto first = run_campaign(
      config_for(specs, {compound::RingMod{}}, dir / "first"), backends);
  ASSERT_EQ(first.report.cells.size(), 1u);
  EXPECT_EQ(first.report.cells[0].generated, 13u);
  EXPECT_EQ(*first.report.cells[0].efr(), 100.0);

  const auto second =
      replay_campaign(dir / "first" / "manifest.json", dir / "second", 2);
  EXPECT_EQ(slurp(dir / "second" / "report.json"),
            slurp(dir / "first" / "report.json"));
  EXPECT_EQ(slurp(dir / "second" / "report.csv"),
            slurp(dir / "first" / "report.csv"));
  EXPECT_EQ(*second.report.cells[0].efr(), 100.0);

  const auto loaded = load_campaign(dir / "first" / "manifest.json");
  EXPECT_EQ(loaded.cases.size(), 13u);
  EXPECT_EQ(report_json_text(loaded.report), report_json_text(first.report));
}

TEST(Export, TwentyPercentOfAHundredPerClass) {
  testing::TempDir dir;
  std::vector<Category> cats(100, Category::kInsult);
  cats.insert(cats.end(), 100, Category::kPorn);
  const auto specs = write_seeds(dir.path(), cats, 1);
  ScriptedBackend mock("mock", [](const AudioBuffer& a) {
    return (a.frames() - kBaseFrames) < 100 ? Category::kInsult
                                            : Category::kPorn;
  });
  const std::vector<const ModerationBackend*> backends{&mock};
  const auto r = run_campaign(config_for(specs, {kLouder}, dir / "out"), backends);
  ASSERT_EQ(r.cases.size(), 200u);

  const auto d = export_retraining_set(r, 0.2, 42);
  std::map<std::pair<Category, std::string>, int> counts;
  for (const auto& e : d.entries) {
    ++counts[{e.label, e.split}];
    EXPECT_EQ(e.mr, to_json(kLouder));
  }
  for (Category c : {Category::kInsult, Category::kPorn}) {
    EXPECT_EQ((counts[{c, "test"}]), 20);
    EXPECT_EQ((counts[{c, "train"}]), 20);
    EXPECT_EQ((counts[{c, "unused"}]), 60);
  }
  EXPECT_EQ(to_json(export_retraining_set(r, 0.2, 42)).dump(), to_json(d).dump());
  EXPECT_NE(to_json(export_retraining_set(r, 0.2, 43)).dump(), to_json(d).dump());
  for (const auto& e : d.entries) {
    ASSERT_TRUE(fs::path(e.artifact).is_absolute());
    EXPECT_NO_THROW(read_wav(e.artifact));
  }
  EXPECT_THROW(export_retraining_set(r, 0.0, 1), ParameterError);
  EXPECT_THROW(export_retraining_set(r, 1.0, 1), ParameterError);
}

struct BadConfig {
  const char* patch;  // JSON merged into a valid document
  const char* field;
};

void PrintTo(const BadConfig& b, std::ostream* os) { *os << b.field; }

class ConfigErrors : public ::testing::TestWithParam<BadConfig> {};

TEST_P(ConfigErrors, NamesTheOffendingField) {
  json doc = {
      {"seeds", {{{"id", "a"}, {"audio", "a.wav"}, {"category", "insult"}}}},
      {"mrs", {{{"name", "gain"}, {"db", 3.0}}}},
      {"backends", {{{"name", "f"}, {"kind", "fixture"}, {"path", "f.json"}}}}};
  EXPECT_NO_THROW(parse_campaign_config(doc, "/tmp"));
  doc.merge_patch(json::parse(GetParam().patch));
  try {
    parse_campaign_config(doc, "/tmp");
    FAIL() << GetParam().patch;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), GetParam().field);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Harness, ConfigErrors,
    ::testing::Values(
        BadConfig{R"({"seeds": null})", "seeds"},
        BadConfig{R"({"seeds": []})", "seeds"},
        BadConfig{R"({"mrs": []})", "mrs"},
        BadConfig{R"({"backends": null})", "backends"},
        BadConfig{R"({"colour": 1})", "colour"},
        BadConfig{R"({"workers": 0})", "workers"},
        BadConfig{R"({"seeds": [{"id": "a", "audio": "a.wav", "category": "non_toxic"}]})",
                  "seeds[0].category"},
        BadConfig{R"({"seeds": [{"id": "a", "audio": "a.wav", "category": "rude"}]})",
                  "seeds[0].category"},
        BadConfig{R"({"mrs": [{"name": "gain", "volume": 2}]})", "mrs[0].volume"},
        BadConfig{R"({"backends": [{"name": "f", "kind": "oracle"}]})",
                  "backends[0].kind"},
        BadConfig{R"({"tts": {"command": "say {text}"}})", "tts.command"},
        BadConfig{R"({"mrs": [{"name": "homophone"}]})", "targets"},
        BadConfig{R"({"mrs": [{"name": "homophone"}], "targets": ["idiot"]})",
                  "seeds[0].transcript"}),
    [](const ::testing::TestParamInfo<BadConfig>& info) {
      std::string name = std::to_string(info.index) + "_";
      for (const char* c = info.param.field; *c; ++c) {
        name += std::isalnum(static_cast<unsigned char>(*c)) ? *c : '_';
      }
      return name;
    });

TEST(Config, RelativePathsResolveAgainstTheConfigFile) {
  testing::TempDir dir;
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "c.json") << R"({
    "seeds": [{"id": "a", "audio": "seeds/a.wav", "category": "spam"}],
    "mrs": [{"name": "echo"}],
    "backends": [{"name": "f", "kind": "fixture", "path": "f.json"}],
    "output_dir": "out", "targets": ["Idiot"]})";
  const auto c = load_campaign_config(dir / "sub" / "c.json");
  EXPECT_EQ(c.seeds[0].audio, dir / "sub" / "seeds" / "a.wav");
  EXPECT_EQ(c.output_dir, dir / "sub" / "out");
  EXPECT_EQ(c.targets, (linguistic::WordSet{"idiot"}));
  EXPECT_EQ(c.workers, 4);
}

TEST(MakeBackend, RejectsBadSpotterAndHttpSettings) {
  EXPECT_THROW(make_backend(json{{"name", "k"}, {"kind", "keyword_spotter"},
                                 {"templates", "t"}, {"threshold", 0.0}},
                            "/tmp"),
               ConfigError);
  EXPECT_THROW(make_backend(json{{"name", "h"}, {"kind", "http"},
                                 {"template", 3}, {"rate_limit", 1.0}},
                            "/tmp"),
               ConfigError);
  EXPECT_THROW(make_backend(json{{"name", "h"}, {"kind", "http"}}, "/tmp"),
               ConfigError);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 2,
                            [](std::size_t i) {
                              if (i == 7) throw IoError("disk full");
                            }),
               IoError);
  EXPECT_THROW(parallel_for(1, 0, [](std::size_t) {}), ParameterError);
}

}  // namespace
}  // namespace audiomt
