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
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"
#include "audiomt/http_backend.hpp"
#include "audiomt/wav.hpp"
#include "signals.hpp"

namespace audiomt {
namespace {

using Clock = std::chrono::steady_clock;

// A moderation endpoint on 127.0.0.1 with a scripted handler.
class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit MockServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/moderate", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      {
        std::lock_guard lock(mutex_);
        arrivals_.push_back(Clock::now());
        requests_.push_back(req);
      }
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/moderate";
  }
  std::vector<Clock::time_point> arrivals() const {
    std::lock_guard lock(mutex_);
    return arrivals_;
  }
  std::vector<httplib::Request> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<Clock::time_point> arrivals_;
  std::vector<httplib::Request> requests_;
};

void reply(httplib::Response& res, const std::string& label, double score) {
  res.set_content("{\"result\":{\"labels\":[{\"name\":\"" + label +
                      "\",\"score\":" + std::to_string(score) + "}]}}",
                  "application/json");
}

HttpTemplate provider_template(const std::string& url) {
  HttpTemplate t;
  t.url = url;
  t.label_path = "result.labels.0.name";
  t.confidence_path = "result.labels.0.score";
  t.labels = {{"abuse", Category::kInsult},
              {"adult", Category::kPorn},
              {"ads", Category::kSpam},
              {"ok", Category::kNonToxic}};
  t.timeout_s = 2.0;
  return t;
}

RetryPolicy quick_retry(int attempts) {
  return RetryPolicy{attempts, std::chrono::milliseconds(5), 2.0};
}

const AudioBuffer kClip = testing::sine(440.0, 0.05, 16000, 0.3);

TEST(MapResponse, FollowsPathsAndLabels) {
  auto t = provider_template("http://x/y");
  const auto v = map_response(t, R"({"result":{"labels":[{"name":"ads","score":0.75}]}})");
  EXPECT_EQ(v.category, Category::kSpam);
  EXPECT_EQ(*v.confidence, 0.75);

  EXPECT_THROW(map_response(t, R"({"result":{"labels":[{"name":"gore"}]}})"),
               MappingError);
  EXPECT_THROW(map_response(t, R"({"result":{}})"), MappingError);
  EXPECT_THROW(map_response(t, "<html>"), MappingError);
  EXPECT_THROW(
      map_response(t, R"({"result":{"labels":[{"name":"ads","score":1.5}]}})"),
      MappingError);

  t.labels.clear();  // labels are taken as category names
  EXPECT_EQ(map_response(t, R"({"result":{"labels":[{"name":"porn"}]}})").category,
            Category::kPorn);
}

TEST(HttpTemplateJson, ParsesAndRejects) {
  const auto t = HttpTemplate::from_json_text(R"({
    "url": "https://api.example.com/v1/scan",
    "headers": {"Authorization": "Bearer ${AUDIOMT_TEST_TOKEN}"},
    "audio_encoding": "multipart",
    "response": {"label_path": "label", "labels": {"bad": "insult"}}})");
  EXPECT_EQ(t.encoding, AudioEncoding::kMultipart);
  EXPECT_EQ(t.labels.at("bad"), Category::kInsult);
  EXPECT_THROW(HttpTemplate::from_json_text("{"), ConfigError);
  EXPECT_THROW(HttpTemplate::from_json_text(R"({"url": "https://a/b"})"),
               ConfigError);
  EXPECT_THROW(HttpTemplate::from_json_text(
                   R"({"url": "a/b", "response": {"label_path": "l"}})"),
               ConfigError);
  EXPECT_THROW(HttpTemplate::from_json_text(
                   R"({"url": "https://a/b", "method": "GET",
                       "response": {"label_path": "l"}})"),
               ConfigError);
}

TEST(ExpandEnvironment, SubstitutesOnlyFromTheEnvironment) {
  ::setenv("AUDIOMT_TEST_TOKEN", "s3cret", 1);
  EXPECT_EQ(expand_environment("Bearer ${AUDIOMT_TEST_TOKEN}!"), "Bearer s3cret!");
  EXPECT_EQ(expand_environment("plain $HOME"), "plain $HOME");
  ::unsetenv("AUDIOMT_TEST_UNSET");
  EXPECT_THROW(expand_environment("${AUDIOMT_TEST_UNSET}"), ConfigError);
}

TEST(HttpBackend, SendsBase64WavAndExpandedHeaders) {
  ::setenv("AUDIOMT_TEST_TOKEN", "tok", 1);
  MockServer server([](const auto&, auto& res) { reply(res, "abuse", 0.9); });
  auto t = provider_template(server.url());
  t.headers = {{"Authorization", "Bearer ${AUDIOMT_TEST_TOKEN}"}};
  HttpBackend backend("p", t, 100.0, quick_retry(1));
  const auto v = backend.moderate(kClip);
  EXPECT_EQ(v.category, Category::kInsult);
  EXPECT_NEAR(*v.confidence, 0.9, 1e-12);

  const auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].get_header_value("Authorization"), "Bearer tok");
  const auto body = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(body["sample_rate"], 16000);
  EXPECT_EQ(body["audio"], base64_encode(encode_wav(kClip)));
}

TEST(HttpBackend, MultipartCarriesTheWavFile) {
  MockServer server([](const auto&, auto& res) { reply(res, "ok", 0.1); });
  auto t = provider_template(server.url());
  t.encoding = AudioEncoding::kMultipart;
  HttpBackend backend("p", t, 100.0, quick_retry(1));
  EXPECT_EQ(backend.moderate(kClip).category, Category::kNonToxic);
  const auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  ASSERT_TRUE(reqs[0].has_file("file"));
  const auto& file = reqs[0].get_file_value("file");
  EXPECT_EQ(file.content_type, "audio/wav");
  const std::vector<std::uint8_t> bytes(file.content.begin(), file.content.end());
  EXPECT_EQ(decode_wav(bytes), quantized(kClip));
}

TEST(HttpBackend, RetriesTransientFailures) {
  std::atomic<int> seen{0};
  MockServer server([&](const auto&, auto& res) {
    const int n = ++seen;
    if (n == 1) {
      res.status = 429;
    } else if (n == 2) {
      res.status = 503;
    } else {
      reply(res, "adult", 0.6);
    }
  });
  HttpBackend backend("p", provider_template(server.url()), 100.0, quick_retry(3));
  EXPECT_EQ(backend.moderate(kClip).category, Category::kPorn);
  EXPECT_EQ(seen.load(), 3);
}

TEST(HttpBackend, GivesUpAfterMaxAttempts) {
  std::atomic<int> seen{0};
  MockServer server([&](const auto&, auto& res) {
    ++seen;
    res.status = 500;
  });
  HttpBackend backend("p", provider_template(server.url()), 100.0, quick_retry(3));
  EXPECT_THROW(backend.moderate(kClip), BackendUnavailableError);
  EXPECT_EQ(seen.load(), 3);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
  std::atomic<int> seen{0};
  MockServer server([&](const auto&, auto& res) {
    ++seen;
    res.status = 401;
  });
  HttpBackend backend("p", provider_template(server.url()), 100.0, quick_retry(4));
  EXPECT_THROW(backend.moderate(kClip), BackendUnavailableError);
  EXPECT_EQ(seen.load(), 1);
}

TEST(HttpBackend, UnmappedLabelIsAMappingError) {
  MockServer server([](const auto&, auto& res) { reply(res, "violence", 0.5); });
  HttpBackend backend("p", provider_template(server.url()), 100.0, quick_retry(2));
  EXPECT_THROW(backend.moderate(kClip), MappingError);
}

TEST(HttpBackend, UnreachableHostIsUnavailable) {
  std::string url;
  {
    MockServer server([](const auto&, auto&) {});
    url = server.url();
  }  // port released, nothing listens there now
  auto t = provider_template(url);
  t.timeout_s = 0.5;
  HttpBackend backend("p", t, 100.0, quick_retry(2));
  EXPECT_THROW(backend.moderate(kClip), BackendUnavailableError);
}

TEST(RateLimiter, SpacesAdmissionsAcrossThreads) {
  RateLimiter limiter(200.0);
  std::vector<Clock::time_point> slots;
  std::mutex m;
  std::vector<std::jthread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) {
        const auto s = limiter.acquire();
        std::lock_guard lock(m);
        slots.push_back(s);
      }
    });
  }
  threads.clear();
  std::sort(slots.begin(), slots.end());
  for (std::size_t i = 1; i < slots.size(); ++i) {
    EXPECT_GE(slots[i] - slots[i - 1], std::chrono::microseconds(5000));
  }
  EXPECT_THROW(RateLimiter(0.0), ConfigError);
}

TEST(HttpBackend, ObservedRateStaysUnderTheLimit) {
  MockServer server([](const auto&, auto& res) { reply(res, "ads", 0.8); });
  const std::size_t limit = 20;
  HttpBackend backend("p", provider_template(server.url()),
                      static_cast<double>(limit), quick_retry(1));
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&] {
        for (int i = 0; i < 10; ++i) backend.moderate(kClip);
      });
    }
  }
  auto t = server.arrivals();
  ASSERT_EQ(t.size(), 40u);
  std::sort(t.begin(), t.end());
  // No one-second window starting at an arrival holds more than `limit`.
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto end = std::lower_bound(t.begin(), t.end(),
                                      t[i] + std::chrono::seconds(1));
    EXPECT_LE(static_cast<std::size_t>(end - (t.begin() + i)), limit) << i;
  }
}

}  // namespace
}  // namespace audiomt
