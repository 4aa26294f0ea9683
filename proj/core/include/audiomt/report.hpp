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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiomt/backend.hpp"

namespace audiomt {

// 100 * misclassified / answered; nullopt when nothing was answered.
// Throws InvariantError when misclassified > answered.
std::optional<double> compute_efr(std::size_t misclassified,
                                  std::size_t answered);

// One (relation, category, backend) aggregate.
struct ReportCell {
  std::string mr;     // canonical relation label
  std::string mr_id;  // catalog id, e.g. MR2-2
  Category category = Category::kInsult;
  std::string backend;
  std::size_t generated = 0;
  std::size_t misclassified = 0;  // toxic seed judged non_toxic
  std::size_t unanswered = 0;     // backend failed; excluded from the EFR
  std::size_t drift = 0;          // flagged, but as another toxic category

  std::size_t answered() const noexcept { return generated - unanswered; }
  std::size_t correct() const noexcept {
    return generated - unanswered - misclassified;
  }
  std::optional<double> efr() const {
    return compute_efr(misclassified, answered());
  }
};

// Seed-filter counts per backend and category: how many originals there were,
// how many the backend labelled with their declared category, and how many
// queries failed.
struct BackendFilterStats {
  std::string backend;
  Category category = Category::kInsult;
  std::size_t originals = 0;
  std::size_t flagged = 0;
  std::size_t unanswered = 0;
};

struct SeedFilterReport {
  std::size_t originals = 0;
  std::size_t retained = 0;
  std::vector<std::string> excluded;  // seed ids, config order
  std::vector<BackendFilterStats> per_backend;
};

struct CampaignReport {
  std::string version;
  std::string status = "ok";  // "ok" or "no_seeds"
  std::vector<ReportCell> cells;
  SeedFilterReport seed_filter;
  std::size_t pending_tts = 0;  // text cases awaiting external synthesis
  std::string manifest = "manifest.json";
};

nlohmann::ordered_json to_json(const CampaignReport& report);
CampaignReport report_from_json(const nlohmann::json& j);
CampaignReport load_report(const std::filesystem::path& path);

// Serialized forms written next to the manifest. Both are deterministic.
std::string report_json_text(const CampaignReport& report);
// Header: mr,mr_id,category,backend,generated,misclassified,unanswered,
// correct,drift,efr (efr empty when undefined).
std::string report_csv(const CampaignReport& report);

// Relation rows x (category/backend) columns of EFR percentages.
std::string report_table(const CampaignReport& report);

// Throws InvariantError when any cell breaks
// generated = misclassified + correct + unanswered or the EFR definition.
void check_accounting(const CampaignReport& report);

}  // namespace audiomt
