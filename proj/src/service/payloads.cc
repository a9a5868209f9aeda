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

#include "fairloop/service/payloads.h"

#include <algorithm>
#include <set>
#include <sstream>

namespace fairloop::service {
namespace {

using json = nlohmann::json;
using fairness::Rate;
using integration::ApplicationStatus;

json CellJson(const data::Cell& cell, const data::SchemaConfig& config,
              const std::string& feature) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* s = std::get_if<std::string>(&cell)) {
    return DisplayValue(config, feature, *s);
  }
  return nullptr;
}

bool CellMatches(const data::Cell& cell, const data::SchemaConfig& config,
                 const std::string& feature, const std::string& wanted) {
  if (const auto* s = std::get_if<std::string>(&cell)) {
    return *s == wanted || DisplayValue(config, feature, *s) == wanted;
  }
  if (const auto* d = std::get_if<double>(&cell)) {
    if (data::CellToString(cell) == wanted) return true;
    try {
      std::size_t used = 0;
      const double w = std::stod(wanted, &used);
      return used == wanted.size() && w == *d;
    } catch (const std::exception&) {
      return false;
    }
  }
  return false;
}

json GroupRef(const data::SchemaConfig& config, const std::string& attribute,
              const std::string& group, double rate) {
  return {{"group", group}, {"label", DisplayValue(config, attribute, group)}, {"rate", rate}};
}

// {min, max} bars for one rate, or null when a group's rate is undefined.
json Bars(const fairness::GroupStats& stats, Rate rate, const data::SchemaConfig& config,
          const std::string& attribute) {
  try {
    const auto e = fairness::Extremes(stats, rate);
    return {{"min", GroupRef(config, attribute, e.min_group, e.min)},
            {"max", GroupRef(config, attribute, e.max_group, e.max)}};
  } catch (const Error&) {
    return nullptr;
  }
}

json AttributeBlock(const fairness::AttributeReport& report,
                    const data::SchemaConfig& config) {
  const std::string& attr = report.attribute;
  json dpr = fairness::ToJson(report.metrics.at(fairness::MetricId::kDpr));
  dpr["selection_rate"] = Bars(report.stats, Rate::kSelection, config, attr);
  json aod = fairness::ToJson(report.metrics.at(fairness::MetricId::kAod));
  aod["tpr"] = Bars(report.stats, Rate::kTpr, config, attr);
  aod["fpr"] = Bars(report.stats, Rate::kFpr, config, attr);

  json distribution = json::array();
  for (const auto& g : report.stats.groups) {
    const double accept =
        g.count == 0 ? 0.0
                     : 100.0 * static_cast<double>(g.predicted_accept) /
                           static_cast<double>(g.count);
    distribution.push_back({{"value", g.group},
                            {"label", DisplayValue(config, attr, g.group)},
                            {"count", g.count},
                            {"accept_percent", accept},
                            {"reject_percent", g.count == 0 ? 0.0 : 100.0 - accept}});
  }
  json metrics = json::object();
  for (const auto& [id, value] : report.metrics) {
    metrics[std::string(fairness::Info(id).key)] = fairness::ToJson(value);
  }
  const auto& schema_feature =
      config.schema.feature(config.schema.RequireIndex(attr));
  return {{"attribute", attr},
          {"display_label", schema_feature.display_label.empty() ? attr
                                                                 : schema_feature.display_label},
          {"dpr", std::move(dpr)},
          {"aod", std::move(aod)},
          {"distribution", std::move(distribution)},
          {"metrics", std::move(metrics)}};
}

}  // namespace

std::string DisplayValue(const data::SchemaConfig& config, const std::string& feature,
                         const std::string& value) {
  const auto f = config.value_labels.find(feature);
  if (f == config.value_labels.end()) return value;
  const auto v = f->second.find(value);
  return v == f->second.end() ? value : v->second;
}

json SessionDescriptor(const std::string& session_id,
                       const integration::FeedbackSession& session,
                       const data::SchemaConfig& config) {
  const auto& pool = session.context().app_pool;
  const auto& schema = pool.schema();
  json attributes = json::array();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& spec = schema.feature(f);
    json entry = {{"name", spec.name},
                  {"kind", data::FeatureKindName(spec.kind)},
                  {"protected", spec.is_protected},
                  {"display_label", spec.display_label.empty() ? spec.name : spec.display_label}};
    if (spec.kind == data::FeatureKind::kCategorical) {
      std::set<std::string> seen;
      for (std::size_t r = 0; r < pool.num_rows(); ++r) {
        if (const auto* s = std::get_if<std::string>(&pool.cell(r, f))) seen.insert(*s);
      }
      json values = json::array();
      for (const auto& v : seen) {
        values.push_back({{"value", v}, {"label", DisplayValue(config, spec.name, v)}});
      }
      entry["values"] = std::move(values);
    }
    attributes.push_back(std::move(entry));
  }
  return {{"schema_version", kApiSchemaVersion},
          {"session_id", session_id},
          {"participant_id", session.participant_id()},
          {"applications", pool.num_rows()},
          {"attributes", std::move(attributes)},
          {"default_attributes", schema.ProtectedFeatureNames()},
          {"feature_weights", session.CurrentFeatureWeights().values()},
          {"undo_depth", session.undo_depth()}};
}

ApplicationQuery ParseApplicationQuery(
    const std::multimap<std::string, std::string>& params, const data::Schema& schema) {
  ApplicationQuery query;
  for (const auto& [key, value] : params) {
    if (key == "sort") {
      static const std::map<std::string, SortKey, std::less<>> kKeys = {
          {"id", SortKey::kId},
          {"confidence", SortKey::kConfidence},
          {"prediction", SortKey::kPrediction},
          {"probability", SortKey::kProbability},
          {"status", SortKey::kStatus}};
      const auto it = kKeys.find(value);
      if (it == kKeys.end()) {
        Fail(ErrorCode::kInvalidArgument, "unknown sort key '" + value + "'",
             "expected one of id, confidence, prediction, probability, status");
      }
      query.sort = it->second;
    } else if (key == "order") {
      if (value != "asc" && value != "desc") {
        Fail(ErrorCode::kInvalidArgument, "unknown order '" + value + "'",
             "expected asc or desc");
      }
      query.descending = value == "desc";
    } else if (key == "filter") {
      const auto eq = value.find('=');
      if (eq == std::string::npos) {
        Fail(ErrorCode::kInvalidArgument, "filter must be attribute=value", value);
      }
      std::string attribute = value.substr(0, eq);
      if (!schema.IndexOf(attribute)) {
        Fail(ErrorCode::kInvalidArgument, "unknown filter attribute '" + attribute + "'");
      }
      query.filters.emplace_back(std::move(attribute), value.substr(eq + 1));
    }
  }
  return query;
}

json ApplicationViews(const integration::FeedbackSession& session,
                      const data::SchemaConfig& config, const ApplicationQuery& query) {
  const auto& pool = session.context().app_pool;
  const auto& schema = pool.schema();
  std::vector<std::pair<std::size_t, std::string>> filters;
  for (const auto& [attribute, value] : query.filters) {
    filters.emplace_back(schema.RequireIndex(attribute), value);
  }

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < pool.num_rows(); ++r) {
    const bool keep = std::all_of(filters.begin(), filters.end(), [&](const auto& f) {
      return CellMatches(pool.cell(r, f.first), config, schema.feature(f.first).name, f.second);
    });
    if (keep) rows.push_back(r);
  }

  std::vector<gbdt::Prediction> shown(pool.num_rows());
  std::vector<ApplicationStatus> status(pool.num_rows());
  for (std::size_t r : rows) {
    shown[r] = session.DisplayedPrediction(r);
    status[r] = session.StatusOf(pool.id(r));
  }
  auto less = [&](std::size_t a, std::size_t b) {
    switch (query.sort) {
      case SortKey::kId:
        return pool.id(a) < pool.id(b);
      case SortKey::kConfidence:
        return shown[a].confidence < shown[b].confidence;
      case SortKey::kProbability:
        return shown[a].probability < shown[b].probability;
      case SortKey::kPrediction:
        return gbdt::OutcomeName(shown[a].label) < gbdt::OutcomeName(shown[b].label);
      case SortKey::kStatus:
        return status[a] < status[b];
    }
    return false;
  };
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return query.descending ? less(b, a) : less(a, b);
  });

  json views = json::array();
  for (std::size_t r : rows) {
    json attributes = json::object();
    for (std::size_t f = 0; f < schema.size(); ++f) {
      attributes[schema.feature(f).name] = CellJson(pool.cell(r, f), config, schema.feature(f).name);
    }
    views.push_back({{"id", pool.id(r)},
                     {"attributes", std::move(attributes)},
                     {"prediction", gbdt::OutcomeName(shown[r].label)},
                     {"probability", shown[r].probability},
                     {"confidence", shown[r].confidence},
                     {"status", integration::ApplicationStatusName(status[r])},
                     {"locked", session.IsLocked(pool.id(r))}});
  }
  return {{"schema_version", kApiSchemaVersion},
          {"total", pool.num_rows()},
          {"count", rows.size()},
          {"applications", std::move(views)}};
}

std::vector<std::string> ParseAttributeList(const std::optional<std::string>& list,
                                            const data::Schema& schema) {
  if (!list) return schema.ProtectedFeatureNames();
  std::vector<std::string> out;
  std::stringstream in(*list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    if (!schema.IndexOf(name)) {
      Fail(ErrorCode::kInvalidArgument, "unknown attribute '" + name + "'");
    }
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

json MetricsPayload(const integration::FeedbackSession& session,
                    const data::SchemaConfig& config,
                    const std::vector<std::string>& attributes) {
  const auto& state = session.state();
  const auto& report = *state.report;
  std::optional<std::vector<gbdt::Outcome>> predicted;
  json blocks = json::array();
  for (const auto& attribute : attributes) {
    if (const auto* block = report.FindAttribute(attribute)) {
      blocks.push_back(AttributeBlock(*block, config));
      continue;
    }
    if (!predicted) predicted = session.evaluator().PredictLabels(*state.model);
    blocks.push_back(AttributeBlock(
        session.evaluator().EvaluateAttribute(*state.model, *predicted, attribute), config));
  }

  std::size_t unfair = 0;
  std::size_t checked = 0;
  for (const auto& entry : session.log()) {
    const auto s = session.StatusOf(entry.feedback.application_id);
    if (s == ApplicationStatus::kUnfair) ++unfair;
    if (s == ApplicationStatus::kChecked) ++checked;
  }
  json overview = {
      {"acceptance_rate", report.acceptance_rate},
      {"consistency", fairness::ToJson(report.Get(fairness::MetricId::kConsistency))},
      {"accuracy", fairness::ToJson(report.Get(fairness::MetricId::kAccuracy))},
      {"unfair_count", unfair},
      {"checked_count", checked},
      {"feedback_count", session.log().size()},
      {"training_rows", state.training_rows},
      {"model_fingerprint", state.model->fingerprint()}};
  return {{"schema_version", kApiSchemaVersion},
          {"overview", std::move(overview)},
          {"attributes", std::move(blocks)},
          {"report", fairness::ToJson(report)}};
}

json ErrorBody(const Error& error) {
  return {{"schema_version", kApiSchemaVersion},
          {"code", ErrorCodeName(error.code())},
          {"message", error.what()},
          {"detail", error.detail()}};
}

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kFailedPrecondition:
      return 409;
    case ErrorCode::kUnprocessable:
    case ErrorCode::kUndefinedMetric:
      return 422;
    case ErrorCode::kUnavailable:
      return 503;
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

}  // namespace fairloop::service
