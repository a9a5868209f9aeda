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

#include "fairloop/data/binning.h"

#include <algorithm>
#include <cmath>

#include "fairloop/common/csv.h"

namespace fairloop::data {

using nlohmann::json;

namespace {

std::vector<double> ObservedValues(const Dataset& dataset, std::size_t feature) {
  std::vector<double> values;
  values.reserve(dataset.num_rows());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    if (const auto* v = std::get_if<double>(&dataset.cell(r, feature))) {
      values.push_back(*v);
    }
  }
  return values;
}

std::vector<std::string> MakeLabels(const std::vector<double>& edges) {
  if (edges.empty()) return {"all"};
  std::vector<std::string> labels;
  labels.push_back("<=" + csv::FormatDouble(edges.front()));
  for (std::size_t i = 1; i < edges.size(); ++i) {
    labels.push_back("(" + csv::FormatDouble(edges[i - 1]) + ", " +
                     csv::FormatDouble(edges[i]) + "]");
  }
  labels.push_back(">" + csv::FormatDouble(edges.back()));
  return labels;
}

std::size_t RequireNumeric(const Dataset& dataset, const std::string& feature) {
  const std::size_t index = dataset.schema().RequireIndex(feature);
  if (dataset.schema().feature(index).kind != FeatureKind::kNumeric) {
    Fail(ErrorCode::kInvalidArgument, "cannot bin categorical feature " + feature);
  }
  return index;
}

}  // namespace

std::size_t BinningRule::BinOf(double value, bool* clamped) const {
  if (clamped != nullptr) *clamped = value < range_min || value > range_max;
  return static_cast<std::size_t>(
      std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

BinningRule MakeBinningRule(const std::string& feature, std::vector<double> edges,
                            const Dataset& fit_on) {
  const std::size_t index = RequireNumeric(fit_on, feature);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i]) || (i > 0 && !(edges[i] > edges[i - 1]))) {
      Fail(ErrorCode::kInvalidArgument,
           "bin edges for " + feature + " must be finite and strictly increasing");
    }
  }
  BinningRule rule{feature, std::move(edges), {}, 0.0, 0.0};
  rule.labels = MakeLabels(rule.edges);
  std::vector<double> values = ObservedValues(fit_on, index);
  values.insert(values.end(), rule.edges.begin(), rule.edges.end());
  if (!values.empty()) {
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    rule.range_min = *lo;
    rule.range_max = *hi;
  }
  return rule;
}

BinningRule QuartileRule(const std::string& feature, const Dataset& fit_on) {
  const std::size_t index = RequireNumeric(fit_on, feature);
  std::vector<double> values = ObservedValues(fit_on, index);
  if (values.empty()) {
    Fail(ErrorCode::kFailedPrecondition,
         "cannot compute quartiles of " + feature + ": no observed values");
  }
  std::sort(values.begin(), values.end());
  std::vector<double> edges;
  for (double q : {0.25, 0.5, 0.75}) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double edge = values[lo] + frac * (values[hi] - values[lo]);
    if (edge >= values.back()) continue;
    if (!edges.empty() && !(edge > edges.back())) continue;
    edges.push_back(edge);
  }
  return MakeBinningRule(feature, std::move(edges), fit_on);
}

Grouping Bin(const Dataset& dataset, const BinningRule& rule,
             Warnings* warnings) {
  const std::size_t index = RequireNumeric(dataset, rule.feature);
  Grouping out;
  out.reserve(dataset.num_rows());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    const auto* v = std::get_if<double>(&dataset.cell(r, index));
    if (v == nullptr) {
      Fail(ErrorCode::kFailedPrecondition,
           "cannot bin missing " + rule.feature + " for " + dataset.id(r));
    }
    bool clamped = false;
    const std::size_t bin = rule.BinOf(*v, &clamped);
    if (clamped) {
      Warn(warnings, rule.feature + " value " + csv::FormatDouble(*v) + " of " +
                         dataset.id(r) + " lies outside the binned range; " +
                         "assigned to boundary bin " + rule.labels[bin]);
    }
    out.push_back(rule.labels[bin]);
  }
  return out;
}

Grouping GroupBy(const Dataset& dataset, const std::string& feature,
                 const BinningRule* rule, Warnings* warnings) {
  const std::size_t index = dataset.schema().RequireIndex(feature);
  if (dataset.schema().feature(index).kind == FeatureKind::kNumeric) {
    if (rule == nullptr) {
      Fail(ErrorCode::kInvalidArgument,
           "numeric attribute " + feature + " needs a binning rule");
    }
    return Bin(dataset, *rule, warnings);
  }
  Grouping out;
  out.reserve(dataset.num_rows());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    const Cell& c = dataset.cell(r, index);
    if (IsMissing(c)) {
      Fail(ErrorCode::kFailedPrecondition,
           "missing " + feature + " for " + dataset.id(r));
    }
    out.push_back(std::get<std::string>(c));
  }
  return out;
}

json ToJson(const BinningRule& rule) {
  return {{"feature", rule.feature},
          {"edges", rule.edges},
          {"labels", rule.labels},
          {"range_min", rule.range_min},
          {"range_max", rule.range_max}};
}

BinningRule BinningRuleFromJson(const json& j) {
  BinningRule rule;
  rule.feature = j.at("feature").get<std::string>();
  rule.edges = j.at("edges").get<std::vector<double>>();
  rule.labels = j.at("labels").get<std::vector<std::string>>();
  rule.range_min = j.at("range_min").get<double>();
  rule.range_max = j.at("range_max").get<double>();
  if (rule.labels.size() != rule.edges.size() + 1) {
    Fail(ErrorCode::kParse, "binning rule for " + rule.feature +
                                " has mismatched labels");
  }
  return rule;
}

}  // namespace fairloop::data
