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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "audiomt/http_backend.hpp"

#include <cstdlib>
#include <fstream>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <regex>
#include <sstream>
#include <thread>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"
#include "audiomt/wav.hpp"

namespace audiomt {
namespace {

using nlohmann::json;

void replace_all(std::string& text, const std::string& from,
                 const std::string& to) {
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos;
       pos += to.size()) {
    text.replace(pos, from.size(), to);
  }
}

const json* follow(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::istringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(part);
      } catch (const std::exception&) {
        return nullptr;
      }
      if (index >= node->size()) return nullptr;
      node = &(*node)[index];
    } else {
      return nullptr;
    }
  }
  return node;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("url", "expected scheme://host[:port]/path");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

RateLimiter::RateLimiter(double requests_per_second,
                         std::chrono::microseconds guard)
    : rate_(requests_per_second) {
  if (!(requests_per_second > 0.0)) {
    throw ConfigError("rate_limit", "must be > 0 requests per second");
  }
  spacing_ = std::chrono::duration_cast<Clock::duration>(
                 std::chrono::duration<double>(1.0 / requests_per_second)) +
             guard;
}

RateLimiter::Clock::time_point RateLimiter::acquire() {
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    slot = std::max(Clock::now(), next_);
    next_ = slot + spacing_;
  }
  std::this_thread::sleep_until(slot);
  return slot;
}

std::string expand_environment(const std::string& value) {
  static const std::regex kVar(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)\})");
  std::string out;
  auto begin = std::sregex_iterator(value.begin(), value.end(), kVar);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(value, last, static_cast<std::size_t>(m.position()) - last);
    const char* env = std::getenv(m[1].str().c_str());
    if (env == nullptr) {
      throw ConfigError("headers", "environment variable " + m[1].str() +
                                       " is not set");
    }
    out += env;
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(value, last);
  return out;
}

HttpTemplate HttpTemplate::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("template", e.what());
  }
  HttpTemplate t;
  try {
    t.url = doc.at("url").get<std::string>();
    t.method = doc.value("method", t.method);
    if (doc.contains("headers")) {
      t.headers = doc["headers"].get<std::map<std::string, std::string>>();
    }
    const std::string encoding = doc.value("audio_encoding", "base64");
    if (encoding == "base64") {
      t.encoding = AudioEncoding::kBase64Json;
    } else if (encoding == "multipart") {
      t.encoding = AudioEncoding::kMultipart;
    } else {
      throw ConfigError("audio_encoding", "expected base64 or multipart");
    }
    t.body_template = doc.value("body_template", t.body_template);
    t.multipart_field = doc.value("multipart_field", t.multipart_field);
    t.timeout_s = doc.value("timeout_s", t.timeout_s);
    const auto& response = doc.at("response");
    t.label_path = response.at("label_path").get<std::string>();
    t.confidence_path = response.value("confidence_path", "");
    if (response.contains("labels")) {
      for (const auto& [label, category] : response["labels"].items()) {
        t.labels.emplace(label, parse_category(category.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("template", e.what());
  } catch (const ParameterError& e) {
    throw ConfigError("template.response.labels", e.what());
  }
  if (t.method != "POST" && t.method != "PUT") {
    throw ConfigError("method", "only POST and PUT carry audio");
  }
  split_url(t.url);
  return t;
}

HttpTemplate HttpTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

Verdict map_response(const HttpTemplate& tmpl, const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw MappingError(std::string("response is not JSON: ") + e.what());
  }
  const json* label = follow(doc, tmpl.label_path);
  if (label == nullptr || !label->is_string()) {
    throw MappingError("response has no string at " + tmpl.label_path);
  }
  Verdict v;
  const auto text = label->get<std::string>();
  if (tmpl.labels.empty()) {
    try {
      v.category = parse_category(text);
    } catch (const ParameterError&) {
      throw MappingError("unmapped provider label '" + text + "'");
    }
  } else {
    const auto it = tmpl.labels.find(text);
    if (it == tmpl.labels.end()) {
      throw MappingError("unmapped provider label '" + text + "'");
    }
    v.category = it->second;
  }
  if (!tmpl.confidence_path.empty()) {
    const json* conf = follow(doc, tmpl.confidence_path);
    if (conf != nullptr && !conf->is_null()) {
      if (!conf->is_number()) throw MappingError("confidence is not a number");
      const double c = conf->get<double>();
      if (c < 0.0 || c > 1.0) throw MappingError("confidence outside [0, 1]");
      v.confidence = c;
    }
  }
  v.raw = body;
  return v;
}

HttpBackend::HttpBackend(std::string name, HttpTemplate tmpl,
                         double requests_per_second, RetryPolicy retry)
    : name_(std::move(name)),
      template_(std::move(tmpl)),
      retry_(retry),
      limiter_(requests_per_second) {
  if (retry_.max_attempts < 1) {
    throw ConfigError("retry.max_attempts", "must be >= 1");
  }
}

Verdict HttpBackend::moderate(const AudioBuffer& audio,
                              const linguistic::Transcript* hint) const {
  const auto wav = encode_wav(audio);
  const auto [origin, path] = split_url(template_.url);

  httplib::Headers headers;
  for (const auto& [key, value] : template_.headers) {
    headers.emplace(key, expand_environment(value));
  }

  std::string body;
  if (template_.encoding == AudioEncoding::kBase64Json) {
    body = template_.body_template;
    std::string transcript;
    if (hint != nullptr) {
      const std::string quoted = json(linguistic::render(*hint)).dump();
      transcript = quoted.substr(1, quoted.size() - 2);
    }
    replace_all(body, "{{audio_base64}}", base64_encode(wav));
    replace_all(body, "{{sample_rate}}", std::to_string(audio.sample_rate()));
    replace_all(body, "{{channels}}", std::to_string(audio.channel_count()));
    replace_all(body, "{{transcript}}", transcript);
  }

  auto delay = retry_.backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(delay.count() * retry_.multiplier));
    }
    limiter_.acquire();

    httplib::Client client(origin);
    const auto timeout = std::chrono::duration<double>(template_.timeout_s);
    client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Result result;
    if (template_.encoding == AudioEncoding::kMultipart) {
      httplib::MultipartFormDataItems items{
          {template_.multipart_field,
           std::string(wav.begin(), wav.end()), "audio.wav", "audio/wav"}};
      if (hint != nullptr) {
        items.push_back({"transcript", linguistic::render(*hint), "", ""});
      }
      result = template_.method == "PUT" ? client.Put(path, headers, items)
                                         : client.Post(path, headers, items);
    } else {
      result = template_.method == "PUT"
                   ? client.Put(path, headers, body, "application/json")
                   : client.Post(path, headers, body, "application/json");
    }

    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      return map_response(template_, result->body);
    }
    last_error = "HTTP " + std::to_string(result->status);
    if (!retryable(result->status)) break;
  }
  throw BackendUnavailableError(name_ + ": " + last_error);
}

}  // namespace audiomt
