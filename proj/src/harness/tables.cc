// Copyright 2026 The Fairloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairloop/harness/tables.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "fairloop/common/csv.h"

namespace fairloop::harness {
namespace {

using fairness::MetricId;
using integration::MetricDelta;

std::size_t DisplayWidth(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

std::string Num(const std::optional<double>& v) {
  return v ? csv::FormatDouble(*v) : std::string();
}

std::string Seed(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

namespace {

// Non-integral numeric cells are shown with four decimals; CSV keeps full
// precision.
std::string TextCell(const std::string& cell) {
  if (cell.empty()) return cell;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v) || v == std::floor(v)) return cell;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string FormatText(const Table& raw) {
  Table table = raw;
  for (auto& row : table) {
    for (auto& cell : row) cell = TextCell(cell);
  }
  std::vector<std::size_t> widths;
  for (const auto& row : table) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], DisplayWidth(row[c]));
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table[r];
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(widths[c] - DisplayWidth(row[c]), ' ');
    }
    out << line << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c ? 2 : 0);
      out << std::string(total, '-') << '\n';
    }
  }
  return out.str();
}

std::string FormatCsv(const Table& table) {
  std::ostringstream out;
  for (const auto& row : table) csv::WriteRecord(out, row);
  return out.str();
}

std::string FormatValue(const std::optional<double>& value, double scale) {
  if (!value) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), scale == 100.0 ? "%.2f" : "%.4f", *value * scale);
  return buf;
}

std::string FormatPercent(const std::optional<double>& percent) {
  if (!percent) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.2f%%", *percent);
  return buf;
}

Table ReportTable(const fairness::FairnessReport& report, std::uint64_t seed) {
  Table t = {{"metric", "attribute", "header", "value", "undefined_reason", "seed"}};
  auto add = [&](MetricId id, const std::string& attribute,
                 const fairness::MetricValue& v) {
    t.push_back({std::string(fairness::Info(id).key), attribute, fairness::Header(id),
                 Num(v.value), v.undefined_reason, Seed(seed)});
  };
  for (const auto& [id, v] : report.overall) add(id, "", v);
  for (const auto& a : report.attributes) {
    for (const auto& [id, v] : a.metrics) add(id, a.attribute, v);
  }
  return t;
}

std::string ReportText(const fairness::FairnessReport& report) {
  Table overall = {{""}, {"value"}};
  for (const auto& [id, v] : report.overall) {
    overall[0].push_back(fairness::Header(id));
    overall[1].push_back(FormatValue(v.value, fairness::Info(id).display_scale));
  }
  overall[0].push_back("Acceptance %");
  overall[1].push_back(FormatValue(report.acceptance_rate, 100.0));
  std::string out = FormatText(overall);
  if (!report.attributes.empty()) {
    Table attrs = {{"attribute"}};
    for (const auto& [id, v] : report.attributes.front().metrics) {
      attrs[0].push_back(fairness::Header(id));
    }
    for (const auto& a : report.attributes) {
      std::vector<std::string> row = {a.attribute};
      for (const auto& [id, v] : a.metrics) row.push_back(FormatValue(v.value));
      attrs.push_back(std::move(row));
    }
    out += '\n' + FormatText(attrs);
  }
  return out;
}

Table DeltaTable(std::span<const MetricDelta> deltas, const std::string& policy,
                 const std::string& mode, std::uint64_t seed) {
  Table t = {{"mode", "policy", "metric", "attribute", "header", "baseline", "value",
              "percent_change", "improvement_percent", "absolute_change",
              "improved", "baseline_zero", "highlight_band", "seed"}};
  for (const auto& d : deltas) {
    std::vector<std::string> row = {mode, policy, std::string(fairness::Info(d.metric).key),
                                    d.attribute, fairness::Header(d.metric),
                                    Num(d.baseline), Num(d.value)};
    if (d.change) {
      row.push_back(Num(d.change->percent));
      row.push_back(Num(d.change->improvement_percent));
      row.push_back(csv::FormatDouble(d.change->absolute_change));
      row.push_back(d.change->improved ? "true" : "false");
      row.push_back(d.change->baseline_zero ? "true" : "false");
      row.push_back(std::string(integration::HighlightBandName(d.change->band)));
    } else {
      row.insert(row.end(), {"", "", "", "", "", "none"});
    }
    row.push_back(Seed(seed));
    t.push_back(std::move(row));
  }
  return t;
}

std::string DeltaText(std::span<const MetricDelta> deltas, const std::string& title) {
  std::vector<std::string> attributes;
  std::vector<MetricId> overall_metrics, attribute_metrics;
  std::map<std::pair<std::string, MetricId>, const MetricDelta*> cells;
  for (const auto& d : deltas) {
    auto& metrics = d.attribute.empty() ? overall_metrics : attribute_metrics;
    if (std::find(metrics.begin(), metrics.end(), d.metric) == metrics.end()) {
      metrics.push_back(d.metric);
    }
    if (!d.attribute.empty() &&
        std::find(attributes.begin(), attributes.end(), d.attribute) == attributes.end()) {
      attributes.push_back(d.attribute);
    }
    cells[{d.attribute, d.metric}] = &d;
  }
  auto cell = [&](const std::string& attribute, MetricId id) {
    auto it = cells.find({attribute, id});
    if (it == cells.end()) return std::string();
    const MetricDelta& d = *it->second;
    std::string text = FormatValue(d.value, fairness::Info(id).display_scale);
    if (d.change && d.change->percent) {
      text += " (" + FormatPercent(d.change->percent) + ")";
    } else if (d.change) {
      text += " (abs " + FormatValue(d.change->absolute_change) + ")";
    }
    return text;
  };
  std::string out = title + "\n\n";
  Table top = {{""}, {"all"}};
  for (MetricId id : overall_metrics) {
    top[0].push_back(fairness::Header(id));
    top[1].push_back(cell("", id));
  }
  if (!overall_metrics.empty()) out += FormatText(top);
  if (!attributes.empty()) {
    Table body = {{"attribute"}};
    for (MetricId id : attribute_metrics) body[0].push_back(fairness::Header(id));
    for (const auto& a : attributes) {
      std::vector<std::string> row = {a};
      for (MetricId id : attribute_metrics) row.push_back(cell(a, id));
      body.push_back(std::move(row));
    }
    out += '\n' + FormatText(body);
  }
  return out;
}

Table SeriesTable(const integration::PersonalizedRun& run, std::uint64_t seed) {
  Table t = {{"participant_id", "step", "metric", "attribute", "baseline", "raw", "cma",
              "seed"}};
  for (const auto& track : run.series.tracks()) {
    for (const auto& p : track.points) {
      t.push_back({run.participant_id, std::to_string(p.step),
                   std::string(fairness::Info(track.metric).key), track.attribute,
                   Num(track.baseline), Num(p.raw), Num(p.cma), Seed(seed)});
    }
  }
  return t;
}

Table ParticipantDeltaTable(std::span<const integration::PersonalizedRun> runs,
                            std::uint64_t seed) {
  Table t = {{"participant_id", "steps", "metric", "attribute", "baseline", "final_cma",
              "percent_change", "improvement_percent", "improved", "highlight_band",
              "seed"}};
  for (const auto& run : runs) {
    for (const auto& d : run.final_deltas) {
      t.push_back({run.participant_id, std::to_string(run.series.steps()),
                   std::string(fairness::Info(d.metric).key), d.attribute,
                   Num(d.baseline), Num(d.value),
                   d.change ? Num(d.change->percent) : "",
                   d.change ? Num(d.change->improvement_percent) : "",
                   d.change && d.change->improved ? "true" : "false",
                   d.change ? std::string(integration::HighlightBandName(d.change->band))
                            : "none",
                   Seed(seed)});
    }
  }
  return t;
}

Table AveragesTable(std::span<const integration::PersonalizedRun> runs,
                    std::uint64_t seed) {
  struct Acc {
    std::optional<double> baseline;
    double value_sum = 0.0, percent_sum = 0.0, improvement_sum = 0.0;
    std::size_t value_n = 0, percent_n = 0;
  };
  std::vector<std::pair<MetricId, std::string>> order;
  std::map<std::pair<MetricId, std::string>, Acc> acc;
  for (const auto& run : runs) {
    for (const auto& d : run.final_deltas) {
      const auto key = std::make_pair(d.metric, d.attribute);
      if (acc.find(key) == acc.end()) order.push_back(key);
      Acc& a = acc[key];
      a.baseline = d.baseline;
      if (d.value) {
        a.value_sum += *d.value;
        ++a.value_n;
      }
      if (d.change && d.change->percent) {
        a.percent_sum += *d.change->percent;
        a.improvement_sum += *d.change->improvement_percent;
        ++a.percent_n;
      }
    }
  }
  Table t = {{"metric", "attribute", "header", "participants", "baseline",
              "mean_final_cma", "mean_percent_change", "mean_improvement_percent",
              "highlight_band", "seed"}};
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    std::optional<double> mean_value, mean_pct, mean_imp;
    if (a.value_n > 0) mean_value = a.value_sum / static_cast<double>(a.value_n);
    if (a.percent_n > 0) {
      mean_pct = a.percent_sum / static_cast<double>(a.percent_n);
      mean_imp = a.improvement_sum / static_cast<double>(a.percent_n);
    }
    std::string band = "none";
    if (mean_pct && *mean_pct != 0.0) band = std::abs(*mean_pct) <= 5.0 ? "light" : "dark";
    t.push_back({std::string(fairness::Info(key.first).key), key.second,
                 fairness::Header(key.first), std::to_string(a.percent_n),
                 Num(a.baseline), Num(mean_value), Num(mean_pct), Num(mean_imp), band,
                 Seed(seed)});
  }
  return t;
}

}  // namespace fairloop::harness
