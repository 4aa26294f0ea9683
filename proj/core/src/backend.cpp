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

#include "audiomt/backend.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "audiomt/digest.hpp"
#include "audiomt/errors.hpp"

namespace audiomt {

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kInsult:
      return "insult";
    case Category::kPorn:
      return "porn";
    case Category::kSpam:
      return "spam";
    case Category::kNonToxic:
      return "non_toxic";
  }
  return "non_toxic";
}

Category parse_category(std::string_view text) {
  if (text == "insult") return Category::kInsult;
  if (text == "porn") return Category::kPorn;
  if (text == "spam") return Category::kSpam;
  if (text == "non_toxic") return Category::kNonToxic;
  throw ParameterError("unknown category '" + std::string(text) + "'");
}

FixtureBackend FixtureBackend::load(std::string name,
                                    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fixture " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw FormatError(path.string() + ": expected object");
  std::map<std::string, Verdict> verdicts;
  for (const auto& [digest, entry] : doc.items()) {
    try {
      Verdict v;
      v.category = parse_category(entry.at("category").get<std::string>());
      if (entry.contains("confidence") && !entry["confidence"].is_null()) {
        v.confidence = entry["confidence"].get<double>();
        if (*v.confidence < 0.0 || *v.confidence > 1.0) {
          throw FormatError("confidence outside [0, 1]");
        }
      }
      v.raw = entry.value("raw", std::string());
      verdicts.emplace(digest, std::move(v));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": entry " + digest + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(path.string() + ": entry " + digest + ": " + e.what());
    }
  }
  return FixtureBackend(std::move(name), std::move(verdicts));
}

void FixtureBackend::save(const std::filesystem::path& path) const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [digest, v] : verdicts_) {
    nlohmann::json entry{{"category", to_string(v.category)}};
    entry["confidence"] =
        v.confidence ? nlohmann::json(*v.confidence) : nlohmann::json(nullptr);
    if (!v.raw.empty()) entry["raw"] = v.raw;
    doc[digest] = std::move(entry);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write fixture " + path.string());
  out << doc.dump(2) << '\n';
}

Verdict FixtureBackend::moderate(const AudioBuffer& audio,
                                 const linguistic::Transcript*) const {
  const std::string digest = audio_digest(audio);
  const auto it = verdicts_.find(digest);
  if (it == verdicts_.end()) {
    throw MissingFixtureError(name_ + ": no fixture for digest " + digest);
  }
  return it->second;
}

}  // namespace audiomt
