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

#ifndef FAIRLOOP_HARNESS_TABLES_H_
#define FAIRLOOP_HARNESS_TABLES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairloop/fairness/report.h"
#include "fairloop/integration/deltas.h"
#include "fairloop/integration/retrain.h"

namespace fairloop::harness {

using Table = std::vector<std::vector<std::string>>;

// Space-padded columns, first row treated as the header.
std::string FormatText(const Table& table);
std::string FormatCsv(const Table& table);

// Short fixed-precision rendering for text tables; "n/a" when undefined.
std::string FormatValue(const std::optional<double>& value, double scale = 1.0);
std::string FormatPercent(const std::optional<double>& percent);

// Long form: one row per metric (and attribute) with the header annotation.
Table ReportTable(const fairness::FairnessReport& report, std::uint64_t seed);
// Baseline layout: overall metrics, then one row per attribute.
std::string ReportText(const fairness::FairnessReport& report);

// Long form of deltas; every number unrounded.
Table DeltaTable(std::span<const integration::MetricDelta> deltas,
                 const std::string& policy, const std::string& mode,
                 std::uint64_t seed);
// Wide layout: value and percent change per cell.
std::string DeltaText(std::span<const integration::MetricDelta> deltas,
                      const std::string& title);

// step, metric, attribute, baseline, raw, cma per row.
Table SeriesTable(const integration::PersonalizedRun& run, std::uint64_t seed);
// One row per participant, metric and attribute from the final CMA.
Table ParticipantDeltaTable(std::span<const integration::PersonalizedRun> runs,
                            std::uint64_t seed);
// Mean over participants of the final-CMA values and percent changes.
Table AveragesTable(std::span<const integration::PersonalizedRun> runs,
                    std::uint64_t seed);

}  // namespace fairloop::harness

#endif  // FAIRLOOP_HARNESS_TABLES_H_
