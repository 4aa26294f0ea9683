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

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "audiomt/backend.hpp"

namespace audiomt {

// Admits callers no faster than `requests_per_second`. Slots are reserved
// under a lock and handed out at a fixed spacing of 1/rate plus `guard`, so
// concurrent callers are serialized and network jitter on the far side does
// not push the observed rate over the limit.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double requests_per_second,
                       std::chrono::microseconds guard =
                           std::chrono::microseconds(2000));

  // Blocks until the caller's slot; returns the admission time.
  Clock::time_point acquire();

  double rate() const noexcept { return rate_; }

 private:
  double rate_;
  Clock::duration spacing_;
  std::mutex mutex_;
  Clock::time_point next_{};
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{200};
  double multiplier = 2.0;
};

enum class AudioEncoding { kBase64Json, kMultipart };

// Declarative description of a moderation endpoint.
//
//   {
//     "url": "http://127.0.0.1:8080/v1/moderate",
//     "method": "POST",
//     "headers": {"Authorization": "Bearer ${MODERATION_API_KEY}"},
//     "audio_encoding": "base64",            // or "multipart"
//     "body_template": "{\"audio\": \"{{audio_base64}}\", \"rate\": {{sample_rate}}}",
//     "multipart_field": "file",
//     "timeout_s": 10,
//     "response": {
//       "label_path": "result.label",
//       "confidence_path": "result.score",
//       "labels": {"abuse": "insult", "sexual": "porn", "ok": "non_toxic"}
//     }
//   }
//
// Header values may reference environment variables as ${NAME}; literal
// secrets do not belong in committed configs. Body placeholders:
// {{audio_base64}} (16-bit WAV bytes), {{sample_rate}}, {{channels}},
// {{transcript}} (JSON-escaped, empty without a hint).
struct HttpTemplate {
  std::string url;
  std::string method = "POST";
  std::map<std::string, std::string> headers;
  AudioEncoding encoding = AudioEncoding::kBase64Json;
  std::string body_template =
      "{\"audio\":\"{{audio_base64}}\",\"sample_rate\":{{sample_rate}}}";
  std::string multipart_field = "file";
  double timeout_s = 10.0;
  std::string label_path;
  std::string confidence_path;
  std::map<std::string, Category> labels;  // empty: labels are category names

  static HttpTemplate load(const std::filesystem::path& path);
  static HttpTemplate from_json_text(const std::string& text);
};

// Maps a provider response body onto a Verdict. Throws MappingError.
Verdict map_response(const HttpTemplate& tmpl, const std::string& body);

// Replaces ${NAME} with the environment value; ConfigError if unset.
std::string expand_environment(const std::string& value);

class HttpBackend final : public ModerationBackend {
 public:
  HttpBackend(std::string name, HttpTemplate tmpl, double requests_per_second,
              RetryPolicy retry = {});

  const std::string& name() const noexcept override { return name_; }

  // Network errors, HTTP 429 and 5xx are retried with exponential backoff;
  // every attempt passes through the rate limiter. Exhausted retries and other
  // non-2xx statuses raise BackendUnavailableError.
  Verdict moderate(const AudioBuffer& audio,
                   const linguistic::Transcript* transcript_hint =
                       nullptr) const override;

  const RateLimiter& limiter() const noexcept { return limiter_; }

 private:
  std::string name_;
  HttpTemplate template_;
  RetryPolicy retry_;
  mutable RateLimiter limiter_;
};

}  // namespace audiomt
