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

#include "fairloop/fairness/group_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace fairloop::fairness {
namespace {

std::string_view RateName(Rate rate) {
  switch (rate) {
    case Rate::kSelection: return "selection rate";
    case Rate::kTpr: return "TPR";
    case Rate::kFpr: return "FPR";
    case Rate::kPpv: return "PPV";
  }
  return "rate";
}

const std::optional<double>& RateOf(const GroupRates& g, Rate rate) {
  switch (rate) {
    case Rate::kSelection: return g.selection_rate;
    case Rate::kTpr: return g.tpr;
    case Rate::kFpr: return g.fpr;
    case Rate::kPpv: return g.ppv;
  }
  return g.selection_rate;
}

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void RequireTwoGroups(const GroupStats& stats) {
  if (stats.groups.size() < 2) {
    Fail(ErrorCode::kUndefinedMetric,
         "at least two groups are required, got " +
             std::to_string(stats.groups.size()));
  }
}

double RequireRate(const GroupRates& g, Rate rate) {
  const auto& value = RateOf(g, rate);
  if (!value) {
    Fail(ErrorCode::kUndefinedMetric,
         std::string(RateName(rate)) + " undefined for group '" + g.group + "'",
         g.group);
  }
  return *value;
}

nlohmann::json OptionalToJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptionalFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

GroupStats ComputeGroupStats(std::span<const Outcome> predicted,
                             std::span<const int> truth,
                             const Grouping& grouping) {
  if (predicted.size() != grouping.size() || truth.size() != grouping.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "predictions, truth and grouping must be aligned");
  }
  if (grouping.empty()) Fail(ErrorCode::kInvalidArgument, "empty group set");
  std::map<std::string, GroupRates> by_group;
  for (std::size_t i = 0; i < grouping.size(); ++i) {
    GroupRates& g = by_group[grouping[i]];
    const bool accept_pred = predicted[i] == Outcome::kAccept;
    const bool accept_truth = truth[i] == data::kTargetAccept;
    ++g.count;
    if (accept_pred) ++g.predicted_accept;
    if (accept_truth) {
      ++g.truth_accept;
      if (accept_pred) ++g.true_accept;
    } else {
      ++g.truth_reject;
      if (accept_pred) ++g.false_accept;
    }
  }
  GroupStats stats;
  for (auto& [name, g] : by_group) {
    g.group = name;
    g.selection_rate = Ratio(g.predicted_accept, g.count);
    g.tpr = Ratio(g.true_accept, g.truth_accept);
    g.fpr = Ratio(g.false_accept, g.truth_reject);
    g.ppv = Ratio(g.true_accept, g.predicted_accept);
    stats.groups.push_back(std::move(g));
  }
  return stats;
}

RateExtremes Extremes(const GroupStats& stats, Rate rate) {
  RequireTwoGroups(stats);
  RateExtremes out;
  bool first = true;
  for (const GroupRates& g : stats.groups) {
    const double v = RequireRate(g, rate);
    if (first || v < out.min) {
      out.min = v;
      out.min_group = g.group;
    }
    if (first || v > out.max) {
      out.max = v;
      out.max_group = g.group;
    }
    first = false;
  }
  return out;
}

double Dpr(const GroupStats& stats) {
  const RateExtremes e = Extremes(stats, Rate::kSelection);
  if (e.max == 0.0) {
    Fail(ErrorCode::kUndefinedMetric,
         "DPR undefined: no group has a predicted Accept");
  }
  return e.min / e.max;
}

double Eod(const GroupStats& stats) {
  const RateExtremes e = Extremes(stats, Rate::kTpr);
  return e.max - e.min;
}

double Aod(const GroupStats& stats, GroupReduction reduction) {
  const RateExtremes tpr = Extremes(stats, Rate::kTpr);
  const RateExtremes fpr = Extremes(stats, Rate::kFpr);
  if (reduction == GroupReduction::kMinMax) {
    return 0.5 * ((tpr.max - tpr.min) + (fpr.max - fpr.min));
  }
  double best = 0.0;
  for (std::size_t a = 0; a < stats.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < stats.groups.size(); ++b) {
      const auto& ga = stats.groups[a];
      const auto& gb = stats.groups[b];
      const double v =
          0.5 * (std::abs(*ga.tpr - *gb.tpr) + std::abs(*ga.fpr - *gb.fpr));
      best = std::max(best, v);
    }
  }
  return best;
}

double Ppd(const GroupStats& stats) {
  const RateExtremes e = Extremes(stats, Rate::kPpv);
  return e.max - e.min;
}

double Cdd(std::span<const Outcome> predicted, const Grouping& grouping,
           const Grouping* strata, Warnings* warnings) {
  if (predicted.size() != grouping.size() ||
      (strata != nullptr && strata->size() != grouping.size())) {
    Fail(ErrorCode::kInvalidArgument,
         "predictions, grouping and strata must be aligned");
  }
  if (grouping.empty()) Fail(ErrorCode::kInvalidArgument, "empty group set");

  std::map<std::string, std::size_t> group_index;
  for (const auto& g : grouping) group_index.emplace(g, 0);
  if (group_index.size() < 2) {
    Fail(ErrorCode::kUndefinedMetric, "CDD needs at least two groups");
  }
  std::size_t next = 0;
  for (auto& [name, index] : group_index) index = next++;
  const std::size_t num_groups = group_index.size();

  // stratum -> per group (reject count, accept count)
  struct Counts {
    std::vector<std::size_t> reject, accept;
    std::size_t size = 0;
  };
  std::map<std::string, Counts> by_stratum;
  for (std::size_t i = 0; i < grouping.size(); ++i) {
    const std::string key = strata ? (*strata)[i] : std::string();
    Counts& c = by_stratum[key];
    if (c.reject.empty()) {
      c.reject.assign(num_groups, 0);
      c.accept.assign(num_groups, 0);
    }
    const std::size_t g = group_index.at(grouping[i]);
    if (predicted[i] == Outcome::kReject) {
      ++c.reject[g];
    } else {
      ++c.accept[g];
    }
    ++c.size;
  }

  std::vector<double> weighted(num_groups, 0.0);
  std::size_t used = 0;
  for (const auto& [name, c] : by_stratum) {
    std::size_t rejects = 0, accepts = 0;
    for (std::size_t g = 0; g < num_groups; ++g) {
      rejects += c.reject[g];
      accepts += c.accept[g];
    }
    if (rejects == 0 || accepts == 0) {
      Warn(warnings, "CDD stratum '" + name + "' skipped: no predicted " +
                         (rejects == 0 ? "Reject" : "Accept"));
      continue;
    }
    for (std::size_t g = 0; g < num_groups; ++g) {
      const double dd = static_cast<double>(c.reject[g]) / rejects -
                        static_cast<double>(c.accept[g]) / accepts;
      weighted[g] += static_cast<double>(c.size) * dd;
    }
    used += c.size;
  }
  if (used == 0) {
    Fail(ErrorCode::kUndefinedMetric,
         "CDD undefined: every stratum lacks a predicted Accept or Reject");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double w : weighted) best = std::max(best, w / static_cast<double>(used));
  return best;
}

nlohmann::json ToJson(const GroupStats& stats) {
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupRates& g : stats.groups) {
    groups.push_back({{"group", g.group},
                      {"count", g.count},
                      {"predicted_accept", g.predicted_accept},
                      {"truth_accept", g.truth_accept},
                      {"truth_reject", g.truth_reject},
                      {"true_accept", g.true_accept},
                      {"false_accept", g.false_accept},
                      {"selection_rate", OptionalToJson(g.selection_rate)},
                      {"tpr", OptionalToJson(g.tpr)},
                      {"fpr", OptionalToJson(g.fpr)},
                      {"ppv", OptionalToJson(g.ppv)}});
  }
  return groups;
}

GroupStats GroupStatsFromJson(const nlohmann::json& json) {
  GroupStats stats;
  for (const auto& j : json) {
    GroupRates g;
    g.group = j.at("group").get<std::string>();
    g.count = j.at("count").get<std::size_t>();
    g.predicted_accept = j.at("predicted_accept").get<std::size_t>();
    g.truth_accept = j.at("truth_accept").get<std::size_t>();
    g.truth_reject = j.at("truth_reject").get<std::size_t>();
    g.true_accept = j.at("true_accept").get<std::size_t>();
    g.false_accept = j.at("false_accept").get<std::size_t>();
    g.selection_rate = OptionalFromJson(j.at("selection_rate"));
    g.tpr = OptionalFromJson(j.at("tpr"));
    g.fpr = OptionalFromJson(j.at("fpr"));
    g.ppv = OptionalFromJson(j.at("ppv"));
    stats.groups.push_back(std::move(g));
  }
  return stats;
}

}  // namespace fairloop::fairness
