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

#ifndef FAIRLOOP_INTEGRATION_DELTAS_H_
#define FAIRLOOP_INTEGRATION_DELTAS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairloop/fairness/report.h"
#include "json.hpp"

namespace fairloop::integration {

using fairness::Direction;
using fairness::MetricId;

enum class HighlightBand { kNone, kLight, kDark };  // |change| 0, <= 5 %, > 5 %
std::string_view HighlightBandName(HighlightBand band);

struct PercentChange {
  // (value - baseline) / |baseline| * 100; empty when the baseline is 0.
  std::optional<double> percent;
  // percent with its sign flipped for lower-better metrics, so positive means
  // improvement; for toward-ideal metrics the sign follows the distance to the
  // ideal. Empty when percent is.
  std::optional<double> improvement_percent;
  double absolute_change = 0.0;  // value - baseline
  bool improved = false;
  bool worsened = false;
  bool baseline_zero = false;  // percent unavailable; use absolute_change
  HighlightBand band = HighlightBand::kNone;
};

PercentChange ComputePercentChange(double baseline, double value,
                                   Direction direction, double ideal = 0.0);

struct MetricDelta {
  MetricId metric = MetricId::kAccuracy;
  std::string attribute;  // empty for overall metrics
  std::optional<double> baseline;
  std::optional<double> value;
  std::optional<PercentChange> change;  // empty if either side undefined
};

// One delta per metric present in both reports, overall metrics first, then
// attributes in `report` order.
std::vector<MetricDelta> ComputeDeltas(const fairness::FairnessReport& baseline,
                                       const fairness::FairnessReport& report);

// Cumulative moving average of a series (undefined points are skipped; the
// average is empty until the first defined point).
std::vector<std::optional<double>> CumulativeMovingAverage(
    std::span<const std::optional<double>> raw);

struct SeriesPoint {
  std::size_t step = 0;  // 1-based integration step
  std::optional<double> raw;
  std::optional<double> cma;
};

struct MetricTrack {
  MetricId metric = MetricId::kAccuracy;
  std::string attribute;
  std::optional<double> baseline;
  std::vector<SeriesPoint> points;

  // Incremental CMA bookkeeping.
  double running_mean = 0.0;
  std::size_t defined_count = 0;
};

class MetricSeries {
 public:
  explicit MetricSeries(const fairness::FairnessReport& baseline);

  // Records one integration step; CMA is maintained incrementally.
  void Append(const fairness::FairnessReport& report);

  std::size_t steps() const { return steps_; }
  const std::vector<MetricTrack>& tracks() const { return tracks_; }
  const MetricTrack* Find(MetricId metric, const std::string& attribute = {}) const;

  // Deltas of the last CMA value against the baseline.
  std::vector<MetricDelta> FinalDeltas() const;

 private:
  std::size_t steps_ = 0;
  std::vector<MetricTrack> tracks_;
};

nlohmann::json ToJson(const PercentChange& change);
nlohmann::json ToJson(const MetricDelta& delta);
nlohmann::json ToJson(std::span<const MetricDelta> deltas);

}  // namespace fairloop::integration

#endif  // FAIRLOOP_INTEGRATION_DELTAS_H_
