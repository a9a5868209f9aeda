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

#include "fairloop/integration/deltas.h"

#include <cmath>

namespace fairloop::integration {
namespace {

using json = nlohmann::json;

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

MetricDelta MakeDelta(MetricId metric, const std::string& attribute,
                      const std::optional<double>& baseline,
                      const std::optional<double>& value) {
  MetricDelta d;
  d.metric = metric;
  d.attribute = attribute;
  d.baseline = baseline;
  d.value = value;
  if (baseline && value) {
    const auto& info = fairness::Info(metric);
    d.change = ComputePercentChange(*baseline, *value, info.direction, info.ideal_value);
  }
  return d;
}

void ForEachMetric(const fairness::FairnessReport& report, auto&& fn) {
  for (const auto& [id, value] : report.overall) fn(id, std::string(), value);
  for (const auto& a : report.attributes) {
    for (const auto& [id, value] : a.metrics) fn(id, a.attribute, value);
  }
}

std::optional<double> Lookup(const fairness::FairnessReport& report, MetricId id,
                             const std::string& attribute, bool* present) {
  if (attribute.empty()) {
    auto it = report.overall.find(id);
    *present = it != report.overall.end();
    return *present ? it->second.value : std::nullopt;
  }
  const auto* a = report.FindAttribute(attribute);
  *present = false;
  if (a == nullptr) return std::nullopt;
  auto it = a->metrics.find(id);
  *present = it != a->metrics.end();
  return *present ? it->second.value : std::nullopt;
}

}  // namespace

std::string_view HighlightBandName(HighlightBand band) {
  switch (band) {
    case HighlightBand::kNone: return "none";
    case HighlightBand::kLight: return "light";
    case HighlightBand::kDark: return "dark";
  }
  return "none";
}

PercentChange ComputePercentChange(double baseline, double value,
                                   Direction direction, double ideal) {
  PercentChange c;
  c.absolute_change = value - baseline;
  double gain = 0.0;  // positive = better
  switch (direction) {
    case Direction::kHigherBetter: gain = value - baseline; break;
    case Direction::kLowerBetter: gain = baseline - value; break;
    case Direction::kTowardIdeal:
      gain = std::abs(baseline - ideal) - std::abs(value - ideal);
      break;
  }
  c.improved = gain > 0.0;
  c.worsened = gain < 0.0;
  if (baseline == 0.0) {
    c.baseline_zero = true;
    return c;
  }
  const double pct = (value - baseline) / std::abs(baseline) * 100.0;
  c.percent = pct;
  c.improvement_percent = c.improved ? std::abs(pct) : -std::abs(pct);
  if (pct == 0.0) {
    c.band = HighlightBand::kNone;
    c.improvement_percent = 0.0;
  } else {
    c.band = std::abs(pct) <= 5.0 ? HighlightBand::kLight : HighlightBand::kDark;
  }
  return c;
}

std::vector<MetricDelta> ComputeDeltas(const fairness::FairnessReport& baseline,
                                       const fairness::FairnessReport& report) {
  std::vector<MetricDelta> out;
  ForEachMetric(report, [&](MetricId id, const std::string& attribute,
                            const fairness::MetricValue& value) {
    bool present = false;
    const auto base = Lookup(baseline, id, attribute, &present);
    if (present) out.push_back(MakeDelta(id, attribute, base, value.value));
  });
  return out;
}

std::vector<std::optional<double>> CumulativeMovingAverage(
    std::span<const std::optional<double>> raw) {
  std::vector<std::optional<double>> out;
  out.reserve(raw.size());
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : raw) {
    if (v) {
      sum += *v;
      ++count;
    }
    out.push_back(count > 0 ? std::optional<double>(sum / static_cast<double>(count))
                            : std::nullopt);
  }
  return out;
}

MetricSeries::MetricSeries(const fairness::FairnessReport& baseline) {
  ForEachMetric(baseline, [&](MetricId id, const std::string& attribute,
                              const fairness::MetricValue& value) {
    MetricTrack track;
    track.metric = id;
    track.attribute = attribute;
    track.baseline = value.value;
    tracks_.push_back(std::move(track));
  });
}

void MetricSeries::Append(const fairness::FairnessReport& report) {
  ++steps_;
  for (auto& track : tracks_) {
    bool present = false;
    const auto raw = Lookup(report, track.metric, track.attribute, &present);
    if (raw) {
      ++track.defined_count;
      track.running_mean +=
          (*raw - track.running_mean) / static_cast<double>(track.defined_count);
    }
    SeriesPoint point;
    point.step = steps_;
    point.raw = raw;
    if (track.defined_count > 0) point.cma = track.running_mean;
    track.points.push_back(point);
  }
}

const MetricTrack* MetricSeries::Find(MetricId metric,
                                      const std::string& attribute) const {
  for (const auto& t : tracks_) {
    if (t.metric == metric && t.attribute == attribute) return &t;
  }
  return nullptr;
}

std::vector<MetricDelta> MetricSeries::FinalDeltas() const {
  std::vector<MetricDelta> out;
  for (const auto& t : tracks_) {
    const std::optional<double> last =
        t.points.empty() ? t.baseline : t.points.back().cma;
    out.push_back(MakeDelta(t.metric, t.attribute, t.baseline, last));
  }
  return out;
}

json ToJson(const PercentChange& c) {
  return {{"percent", Optional(c.percent)},
          {"improvement_percent", Optional(c.improvement_percent)},
          {"absolute_change", c.absolute_change},
          {"improved", c.improved},
          {"worsened", c.worsened},
          {"baseline_zero", c.baseline_zero},
          {"highlight_band", HighlightBandName(c.band)}};
}

json ToJson(const MetricDelta& d) {
  json out = {{"metric", fairness::Info(d.metric).key},
              {"attribute", d.attribute},
              {"baseline", Optional(d.baseline)},
              {"value", Optional(d.value)}};
  out["change"] = d.change ? ToJson(*d.change) : json(nullptr);
  return out;
}

json ToJson(std::span<const MetricDelta> deltas) {
  json out = json::array();
  for (const auto& d : deltas) out.push_back(ToJson(d));
  return out;
}

}  // namespace fairloop::integration
