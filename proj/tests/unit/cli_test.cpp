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

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audiomt/digest.hpp"
#include "audiomt/wav.hpp"
#include "cli.hpp"
#include "signals.hpp"

namespace audiomt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const fs::path kDesk = AUDIOMT_DESK_DIR;

TEST(Cli, VersionAndUsage) {
  const auto v = cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_FALSE(v.out.empty());
  EXPECT_EQ(cli({}).code, cli::kUsage);
  EXPECT_EQ(cli({"dance"}).code, cli::kUsage);
}

TEST(Cli, PerturbWritesTheArtifactAndEchoesItsDescriptor) {
  testing::TempDir dir;
  write_wav(testing::sine(440.0, 0.25, 16000, 0.25), dir / "in.wav");
  const auto r = cli({"perturb", "--mr", "gain", "--db", "6",
                      (dir / "in.wav").string(), (dir / "out.wav").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto echo = json::parse(r.out);
  EXPECT_EQ(echo["mr"]["name"], "gain");
  EXPECT_EQ(echo["mr"]["db"], 6.0);
  EXPECT_EQ(echo["id"], "MR1-5");
  const auto written = read_wav(dir / "out.wav");
  EXPECT_EQ(echo["digest"], audio_digest(quantized(written)));
  EXPECT_NEAR(peak(written), 0.5, 0.01);

  const auto p = cli({"perturb", "--mr", "echo", "--params",
                      R"({"delay_s": 0.1, "taps": 1})", (dir / "in.wav").string(),
                      (dir / "echo.wav").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(json::parse(p.out)["label"], "echo(delay_s=0.1,decay=0.5,taps=1)");
}

TEST(Cli, PerturbFailures) {
  testing::TempDir dir;
  write_wav(testing::sine(440.0, 0.1), dir / "in.wav");
  const auto in = (dir / "in.wav").string();
  const auto out = (dir / "o.wav").string();
  EXPECT_EQ(cli({"perturb", "--mr", "flange", in, out}).code, cli::kUsage);
  EXPECT_EQ(cli({"perturb", "--mr", "gain", "--db", "loud", in, out}).code,
            cli::kUsage);
  EXPECT_EQ(cli({"perturb", "--mr", "time-stretch", "--factor", "9", in, out}).code,
            cli::kUsage);
  EXPECT_EQ(cli({"perturb", "--mr", "homophone", in, out}).code, cli::kUsage);
  EXPECT_EQ(cli({"perturb", "--mr", "gain", (dir / "missing.wav").string(), out}).code,
            cli::kRuntime);
}

TEST(Cli, CampaignConfigErrorsAreUsageErrors) {
  testing::TempDir dir;
  std::ofstream(dir / "c.json") << R"({"mrs": [{"name": "gain"}],
    "backends": [{"name": "f", "kind": "fixture", "path": "f.json"}]})";
  const auto r = cli({"campaign", (dir / "c.json").string()});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("seeds"), std::string::npos);
  EXPECT_EQ(cli({"campaign"}).code, cli::kUsage);
  EXPECT_EQ(cli({"campaign", "--replay", "m.json"}).code, cli::kUsage);
}

TEST(Cli, CampaignWithEverySeedFilteredExitsThree) {
  testing::TempDir dir;
  const auto tone = quantized(testing::sine(500.0, 0.2, 16000, 0.2));
  write_wav(tone, dir / "a.wav");
  std::ofstream(dir / "f.json")
      << json{{audio_digest(tone), {{"category", "non_toxic"}}}}.dump();
  std::ofstream(dir / "c.json") << R"({
    "seeds": [{"id": "a", "audio": "a.wav", "category": "porn"}],
    "mrs": [{"name": "gain", "db": 3}],
    "backends": [{"name": "f", "kind": "fixture", "path": "f.json"}],
    "output_dir": "out"})";
  const auto r = cli({"campaign", (dir / "c.json").string()});
  EXPECT_EQ(r.code, cli::kNoSeeds) << r.err;
  EXPECT_EQ(json::parse(r.out)["status"], "no_seeds");
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
}

TEST(Cli, ShippedFixtureCampaignRunsAndReplays) {
  testing::TempDir dir;
  const auto first = (dir / "first").string();
  const auto r = cli({"campaign", (kDesk / "campaign_fixture.json").string(),
                      "--output", first, "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["status"], "ok");
  EXPECT_NE(r.err.find("retained"), std::string::npos);

  const auto replay = cli({"campaign", "--replay", first + "/manifest.json",
                           "--output", (dir / "second").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(replay.out, r.out);

  const auto csv = cli({"report", first + "/report.json"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.rfind("mr,mr_id,category,backend,", 0), 0u);

  const auto exported = cli({"report", first + "/report.json", "--export-split",
                             "0.5", "--seed", "7"});
  ASSERT_EQ(exported.code, 0) << exported.err;
  EXPECT_FALSE(json::parse(exported.out)["entries"].empty());
  EXPECT_EQ(cli({"report", first + "/report.json", "--export-split", "1.5"}).code,
            cli::kUsage);
}

TEST(Cli, CalibrateSeparatesTheDeskClips) {
  const auto r = cli({"calibrate", "--templates", (kDesk / "templates").string(),
                      "--clips", (kDesk / "calibration").string(), "--hop-s",
                      "0.02"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["accuracy"], 1.0);
  EXPECT_GT(j["threshold"].get<double>(), 0.0);
}

TEST(Cli, Keywords) {
  testing::TempDir dir;
  std::ofstream(dir / "corpus.txt") << "you idiot\nyou fool idiot idiot\nhello you\n";
  std::ofstream(dir / "stop.txt") << "you\n";
  const auto r = cli({"keywords", (dir / "corpus.txt").string(), "--stopwords",
                      (dir / "stop.txt").string(), "-k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\t')), "idiot");
  std::ofstream(dir / "empty.txt") << "\n\n";
  EXPECT_EQ(cli({"keywords", (dir / "empty.txt").string()}).code, cli::kUsage);
}

}  // namespace
}  // namespace audiomt
