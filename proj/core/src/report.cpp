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

#include "audiomt/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "audiomt/errors.hpp"

namespace audiomt {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<double> compute_efr(std::size_t misclassified,
                                  std::size_t answered) {
  if (misclassified > answered) {
    throw InvariantError("misclassified count exceeds answered count");
  }
  if (answered == 0) return std::nullopt;
  return 100.0 * static_cast<double>(misclassified) /
         static_cast<double>(answered);
}

ordered_json to_json(const CampaignReport& report) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    const auto efr = c.efr();
    cells.push_back({{"mr", c.mr},
                     {"mr_id", c.mr_id},
                     {"category", to_string(c.category)},
                     {"backend", c.backend},
                     {"generated", c.generated},
                     {"misclassified", c.misclassified},
                     {"unanswered", c.unanswered},
                     {"correct", c.correct()},
                     {"drift", c.drift},
                     {"efr", efr ? ordered_json(*efr) : ordered_json(nullptr)}});
  }
  ordered_json per_backend = ordered_json::array();
  for (const auto& s : report.seed_filter.per_backend) {
    per_backend.push_back({{"backend", s.backend},
                           {"category", to_string(s.category)},
                           {"originals", s.originals},
                           {"flagged", s.flagged},
                           {"unanswered", s.unanswered}});
  }
  ordered_json out;
  out["version"] = report.version;
  out["status"] = report.status;
  out["cells"] = std::move(cells);
  out["seed_filter"] = {{"originals", report.seed_filter.originals},
                        {"retained", report.seed_filter.retained},
                        {"excluded", report.seed_filter.excluded},
                        {"per_backend", std::move(per_backend)}};
  out["pending_tts"] = report.pending_tts;
  out["manifest"] = report.manifest;
  return out;
}

CampaignReport report_from_json(const json& j) {
  try {
    CampaignReport r;
    r.version = j.at("version").get<std::string>();
    r.status = j.at("status").get<std::string>();
    for (const auto& c : j.at("cells")) {
      ReportCell cell;
      cell.mr = c.at("mr").get<std::string>();
      cell.mr_id = c.at("mr_id").get<std::string>();
      cell.category = parse_category(c.at("category").get<std::string>());
      cell.backend = c.at("backend").get<std::string>();
      cell.generated = c.at("generated").get<std::size_t>();
      cell.misclassified = c.at("misclassified").get<std::size_t>();
      cell.unanswered = c.at("unanswered").get<std::size_t>();
      cell.drift = c.value("drift", std::size_t{0});
      r.cells.push_back(std::move(cell));
    }
    const auto& f = j.at("seed_filter");
    r.seed_filter.originals = f.at("originals").get<std::size_t>();
    r.seed_filter.retained = f.at("retained").get<std::size_t>();
    r.seed_filter.excluded = f.at("excluded").get<std::vector<std::string>>();
    for (const auto& s : f.at("per_backend")) {
      r.seed_filter.per_backend.push_back(
          {s.at("backend").get<std::string>(),
           parse_category(s.at("category").get<std::string>()),
           s.at("originals").get<std::size_t>(), s.at("flagged").get<std::size_t>(),
           s.at("unanswered").get<std::size_t>()});
    }
    r.pending_tts = j.value("pending_tts", std::size_t{0});
    r.manifest = j.value("manifest", std::string("manifest.json"));
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

CampaignReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string report_json_text(const CampaignReport& report) {
  return to_json(report).dump(2) + "\n";
}

std::string report_csv(const CampaignReport& report) {
  const auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "mr,mr_id,category,backend,generated,misclassified,unanswered,"
         "correct,drift,efr\n";
  for (const auto& c : report.cells) {
    const auto efr = c.efr();
    out << quote(c.mr) << ',' << c.mr_id << ',' << to_string(c.category) << ','
        << quote(c.backend) << ',' << c.generated << ',' << c.misclassified
        << ',' << c.unanswered << ',' << c.correct() << ',' << c.drift << ','
        << (efr ? json(*efr).dump() : "") << '\n';
  }
  return out.str();
}

std::string report_table(const CampaignReport& report) {
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::map<std::pair<std::string, std::string>, std::string> values;
  for (const auto& c : report.cells) {
    const std::string column =
        std::string(to_string(c.category)) + "/" + c.backend;
    if (std::find(columns.begin(), columns.end(), column) == columns.end()) {
      columns.push_back(column);
    }
    if (std::find(rows.begin(), rows.end(), c.mr) == rows.end()) {
      rows.push_back(c.mr);
    }
    const auto efr = c.efr();
    char buf[32];
    if (efr) {
      std::snprintf(buf, sizeof buf, "%.1f", *efr);
    } else {
      std::snprintf(buf, sizeof buf, "-");
    }
    values[{c.mr, column}] = buf;
  }
  std::size_t first = 4;
  for (const auto& r : rows) first = std::max(first, r.size());
  std::ostringstream out;
  out << "EFR (%)";
  out << std::string(first > 7 ? first - 7 : 0, ' ');
  for (const auto& col : columns) out << "  " << col;
  out << '\n';
  for (const auto& r : rows) {
    out << r << std::string(first - r.size(), ' ');
    for (const auto& col : columns) {
      const auto it = values.find({r, col});
      const std::string v = it == values.end() ? "" : it->second;
      out << "  " << std::string(col.size() > v.size() ? col.size() - v.size() : 0, ' ')
          << v;
    }
    out << '\n';
  }
  return out.str();
}

void check_accounting(const CampaignReport& report) {
  for (const auto& c : report.cells) {
    if (c.unanswered > c.generated || c.misclassified > c.answered() ||
        c.drift > c.correct()) {
      throw InvariantError("inconsistent counts in cell " + c.mr + "/" +
                           std::string(to_string(c.category)) + "/" + c.backend);
    }
    if (c.generated != c.misclassified + c.correct() + c.unanswered) {
      throw InvariantError("accounting identity broken in cell " + c.mr);
    }
  }
}

}  // namespace audiomt
